#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "owbo/core.hpp"

namespace owbo {

// reference optimum for regret computation, in unit-cube coordinates
struct Truth {
    std::vector<Eigen::VectorXd> minimizers_unit;
    double min_value = 0.0;
};

struct IterRecord {
    int iter = 0;
    Eigen::VectorXd recommendation;  // unit-cube coordinates
    double simple_regret = 0.0;
    double distance = 0.0;  // NaN when no reference minimizers are known
    double observation_regret = 0.0;
    double wall_seconds = 0.0;  // cumulative since run start; excluded from determinism
};

struct RegretTrace {
    std::vector<IterRecord> records;
    bool failed = false;
    std::string failure_message;
};

// everything metrics() needs, recorded by run()
struct History {
    std::vector<Eigen::VectorXd> recommendations;
    std::vector<double> recommendation_values;  // noise-free objective at each recommendation
    std::vector<double> observed;               // initial outputs first, then one per iteration
    int n_init = 0;
};

struct MetricSeqs {
    Eigen::VectorXd simple_regret;
    Eigen::VectorXd distance;
    Eigen::VectorXd observation_regret;
};

// Eq.-style running minima: r(n) on noise-free recommendation values minus the
// true minimum (0 when truth is absent), distance as the squared gap to the
// nearest reference minimizer, observation regret over raw noisy outputs.
MetricSeqs metrics(const History& history, const Truth* truth);

// The sequential loop: LHS initial design, then per iteration refit the
// surrogate, rebuild the density pipeline for weighted rules, optimize the
// acquisition, query with additive noise, and record the running metrics.
// `objective` is noise-free on the unit cube; noise N(0, sigma_eps2 * var0)
// is added inside, var0 being the variance of the initial noise-free outputs.
RegretTrace run(const ExperimentConfig& config,
                const std::function<double(const Eigen::VectorXd&)>& objective,
                const Truth* truth = nullptr);

}  // namespace owbo
