#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "owbo/acquisition_spec.hpp"
#include "owbo/bench.hpp"
#include "owbo/benchfns.hpp"
#include "owbo/bo.hpp"
#include "owbo/precursor.hpp"

namespace py = pybind11;

namespace {

py::dict benchmark_info(const std::string& name, int d) {
    const owbo::Benchmark b = owbo::make_benchmark(name, d);
    py::dict out;
    out["name"] = b.name;
    out["dim"] = b.dim;
    out["lower"] = b.domain.lower;
    out["upper"] = b.domain.upper;
    out["min_value"] = b.true_min_value;
    out["minimizers"] = b.true_minimizers;
    return out;
}

double benchmark_eval(const std::string& name, int d, const Eigen::VectorXd& x) {
    return owbo::make_benchmark(name, d).evaluate(x);
}

py::dict run_experiment(const std::string& function, int dim, const std::string& acq,
                        int n_iter, int n_init, std::uint64_t seed, double noise,
                        int n_gmm, int n_samples, int n_fit_samples) {
    owbo::ExperimentConfig cfg;
    std::function<double(const Eigen::VectorXd&)> objective;
    std::optional<owbo::Truth> truth;
    if (function == "precursor") {
        const owbo::DynSystem system;
        const owbo::PcaSubspace sub = owbo::build_subspace(system, 100.0, 1000.0, 0.1);
        owbo::PrecursorProblem prob = owbo::precursor_objective(sub, system, 50.0);
        cfg.domain = prob.domain;
        cfg.prior = prob.prior;
        cfg.dim = 2;
        const owbo::Domain domain = prob.domain;
        const auto obj = prob.objective;
        objective = [domain, obj](const Eigen::VectorXd& u) {
            return obj(owbo::unrescale(domain, u));
        };
    } else {
        const owbo::Benchmark bench = owbo::make_benchmark(function, dim);
        cfg.domain = bench.domain;
        cfg.prior = owbo::InputPrior::uniform(bench.domain);
        cfg.dim = bench.dim;
        objective = owbo::unit_objective(bench);
        const owbo::BenchmarkTruth t = owbo::benchmark_truth_unit(bench);
        truth = owbo::Truth{t.minimizers_unit, t.min_value};
    }
    cfg.objective = function;
    cfg.acquisition.kind = owbo::parse_acq(acq);
    cfg.n_iter = n_iter;
    cfg.n_init = n_init > 0 ? n_init : (cfg.dim == 2 ? 3 : 10);
    cfg.seed = seed;
    cfg.noise_variance = noise;
    cfg.n_gmm = n_gmm;
    cfg.n_samples_kde = n_samples;
    cfg.n_fit_samples = n_fit_samples;

    const owbo::RegretTrace trace = owbo::run(cfg, objective, truth ? &*truth : nullptr);
    std::vector<int> iters;
    std::vector<double> r, dist, ro, wall;
    for (const auto& rec : trace.records) {
        iters.push_back(rec.iter);
        r.push_back(rec.simple_regret);
        dist.push_back(rec.distance);
        ro.push_back(rec.observation_regret);
        wall.push_back(rec.wall_seconds);
    }
    py::dict out;
    out["iter"] = iters;
    out["simple_regret"] = r;
    out["distance"] = dist;
    out["observation_regret"] = ro;
    out["wall_seconds"] = wall;
    out["failed"] = trace.failed;
    out["failure_message"] = trace.failure_message;
    return out;
}

py::tuple output_pdf_py(const std::string& function, int dim, int n_samples,
                        std::uint64_t seed) {
    const owbo::Benchmark bench = owbo::make_benchmark(function, dim);
    owbo::Rng rng(seed);
    const owbo::Kde1d kde = owbo::output_pdf(bench, n_samples, rng);
    return py::make_tuple(kde.grid, kde.density);
}

}  // namespace

PYBIND11_MODULE(_owbo, m) {
    m.doc() = "Bayesian optimization with output-weighted acquisition functions";
    m.def("benchmarks", [] { return owbo::benchmark_names(); },
          "names of the built-in test functions");
    m.def("benchmark_info", &benchmark_info, py::arg("name"), py::arg("dim") = 2,
          "domain and reference optimum of a test function");
    m.def("benchmark_eval", &benchmark_eval, py::arg("name"), py::arg("dim"), py::arg("x"),
          "evaluate a test function");
    m.def("run", &run_experiment, py::arg("function"), py::arg("dim") = 2,
          py::arg("acq") = "ei", py::arg("n_iter") = 60, py::arg("n_init") = -1,
          py::arg("seed") = 0, py::arg("noise") = 1e-3, py::arg("n_gmm") = 2,
          py::arg("n_samples") = 100000, py::arg("n_fit_samples") = 10000,
          "run one seeded BO experiment and return the metric trace");
    m.def("output_pdf", &output_pdf_py, py::arg("function"), py::arg("dim") = 2,
          py::arg("n_samples") = 100000, py::arg("seed") = 0,
          "KDE (grid, density) of a test function's output under uniform input");
}
