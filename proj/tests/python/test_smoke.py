import math

import owbo


def test_benchmark_names_and_info():
    names = owbo.benchmarks()
    assert "ackley" in names and "branin" in names
    info = owbo.benchmark_info("branin", 2)
    assert info["dim"] == 2
    assert len(info["minimizers"]) == 3
    got = owbo.benchmark_eval("branin", 2, info["minimizers"][0])
    assert 0.0 <= got - info["min_value"] <= 1e-6


def test_short_run_monotone():
    trace = owbo.run(
        "ackley",
        dim=2,
        acq="lcb-lw",
        n_iter=3,
        n_init=3,
        seed=7,
        noise=1e-3,
        n_gmm=2,
        n_samples=2000,
        n_fit_samples=400,
    )
    assert not trace["failed"], trace["failure_message"]
    assert trace["iter"] == [0, 1, 2, 3]
    for key in ("simple_regret", "distance", "observation_regret"):
        seq = trace[key]
        assert all(b <= a + 1e-12 for a, b in zip(seq, seq[1:])), key


def test_output_pdf_integrates_to_one():
    grid, density = owbo.output_pdf("ackley", dim=2, n_samples=2000, seed=1)
    assert len(grid) == 1024
    step = grid[1] - grid[0]
    total = sum(density) * step - 0.5 * step * (density[0] + density[-1])
    assert math.isclose(total, 1.0, abs_tol=0.02)
