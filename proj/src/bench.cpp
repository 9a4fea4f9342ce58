#include "owbo/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "owbo/acquisition.hpp"
#include "owbo/benchfns.hpp"
#include "owbo/bo.hpp"
#include "owbo/density.hpp"
#include "owbo/gp.hpp"
#include "owbo/optim.hpp"

namespace owbo {

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double timed_iteration(const AcquisitionSpec& spec, int d, int n_samples, int n_gmm,
                       Rng rng) {
    const Benchmark bench = make_benchmark("ackley", d);
    const auto objective = unit_objective(bench);
    const InputPrior prior = InputPrior::uniform(bench.domain);
    const UnitPrior uprior(prior, bench.domain);

    // fresh 10-point design and surrogate, outside the timed section
    Rng rng_init = rng.substream(0);
    Rng rng_kde = rng.substream(2);
    Rng rng_gmm = rng.substream(3);
    Rng rng_ms = rng.substream(4);
    Dataset data(Domain::unit_cube(d));
    const Eigen::MatrixXd x0 = lhs(10, d, rng_init);
    for (int i = 0; i < x0.rows(); ++i)
        data.append(x0.row(i).transpose(), objective(x0.row(i).transpose()));
    GpModel model = GpModel::fit(data, rng_ms);

    const auto t0 = std::chrono::steady_clock::now();

    AcquisitionSpec active = spec;
    std::optional<GaussianMixture> mixture;
    if (active.weighted()) {
        try {
            const Eigen::VectorXd mu = sample_mu(model, uprior, n_samples, rng_kde);
            const LikelihoodRatio w = likelihood_ratio(model, uprior, kde_1d(mu));
            mixture = fit_gmm([&w](const Eigen::VectorXd& x) { return w(x); }, uprior,
                              n_gmm, 10000, rng_gmm);
        } catch (const DegenerateDensity&) {
            active = active.unweighted();
        }
    }
    const Acquisition acq(active, model, mixture ? &*mixture : nullptr);
    const Eigen::VectorXd x_new =
        minimize_bounded(acq.as_min_objective(), d, 10 * d, rng_ms).x;
    data.append(x_new, objective(x_new));
    model = GpModel::fit(data, rng_ms);

    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<BenchRow> bench_sweep(const std::string& param, const std::vector<double>& values,
                                  const std::vector<AcquisitionSpec>& acqs, int repeats,
                                  std::uint64_t seed) {
    if (param != "n_samples" && param != "n_gmm" && param != "d")
        throw std::invalid_argument("bench_sweep: param must be n_samples, n_gmm, or d");
    if (values.empty()) throw std::invalid_argument("bench_sweep: no sweep values");
    if (repeats < 1) throw std::invalid_argument("bench_sweep: repeats must be >= 1");

    Rng root(seed);
    std::uint64_t stream = 0;
    std::vector<BenchRow> rows;
    for (const double value : values) {
        int d = 2, n_samples = 1000000, n_gmm = 2;
        if (param == "n_samples") n_samples = static_cast<int>(value);
        else if (param == "n_gmm") n_gmm = static_cast<int>(value);
        else d = static_cast<int>(value);
        if (d < 1 || n_samples < 100 || n_gmm < 1)
            throw std::invalid_argument("bench_sweep: sweep value out of range");

        for (const auto& spec : acqs) {
            std::vector<double> times;
            times.reserve(repeats);
            for (int r = 0; r < repeats; ++r)
                times.push_back(
                    timed_iteration(spec, d, n_samples, n_gmm, root.substream(stream++)));
            rows.push_back({param, value, acq_name(spec.kind), median(times)});
        }
    }
    return rows;
}

}  // namespace owbo
