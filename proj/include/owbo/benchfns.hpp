#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "owbo/core.hpp"
#include "owbo/density.hpp"
#include "owbo/rng.hpp"

namespace owbo {

// A synthetic test function with its domain and reference optimum.  The
// minimizers and minimum value come from the checked-in fixture data (or the
// OWBO_FIXTURES override file); entries absent from the fixtures are derived
// on the spot by the built-in brute-force oracles.
struct Benchmark {
    std::string name;
    int dim = 0;
    Domain domain = Domain::unit_cube(1);
    std::function<double(const Eigen::VectorXd&)> evaluate;
    std::vector<Eigen::VectorXd> true_minimizers;
    double true_min_value = 0.0;
};

// name in {ackley, branin, bukin, michalewicz, hartmann6}; d must match the
// fixed-dimension functions and is free for ackley/michalewicz
Benchmark make_benchmark(const std::string& name, int d);

const std::vector<std::string>& benchmark_names();

// noise-free objective on the unit cube
std::function<double(const Eigen::VectorXd&)> unit_objective(const Benchmark& bench);

// reference minimizers mapped to unit-cube coordinates, plus the minimum value
struct BenchmarkTruth {
    std::vector<Eigen::VectorXd> minimizers_unit;
    double min_value = 0.0;
};
BenchmarkTruth benchmark_truth_unit(const Benchmark& bench);

// objective on the unit cube with additive noise N(0, sigma_eps2 * var0),
// var0 estimated from 1e3 LHS probes of the noise-free function; the wrapper
// owns a private noise stream (substream 1 of rng; substream 0 probes)
std::function<double(const Eigen::VectorXd&)> noisy_unit_wrapper(const Benchmark& bench,
                                                                 double sigma_eps2, Rng rng);

// KDE of f(x) under uniform domain sampling, for output-tail inspection
Kde1d output_pdf(const Benchmark& bench, int n_samples, Rng& rng);

// fixture plumbing, exposed for the generator tool and tests
struct FixtureEntry {
    Eigen::VectorXd lower, upper;
    std::vector<Eigen::VectorXd> minimizers;
    double min_value = 0.0;
};
// parsed view of the active fixture source (embedded text unless OWBO_FIXTURES is set)
const std::vector<std::pair<std::string, FixtureEntry>>& fixture_store();
std::vector<std::pair<std::string, FixtureEntry>> parse_fixture_text(const std::string& text);
std::string fixture_key(const std::string& name, int d);

}  // namespace owbo
