#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "owbo/rng.hpp"

namespace owbo {

// value-and-gradient callable: returns f(x), fills grad (same size as x)
using ObjectiveGrad = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

// Latin hypercube design on [0,1]^d: per dimension an independent random
// permutation of strata with in-stratum jitter; exactly one point per stratum.
Eigen::MatrixXd lhs(int n, int d, Rng& rng);

struct MinimizeOptions {
    int max_iters = 200;
    double grad_tol = 1e-8;  // on the projected gradient, infinity norm
    int memory = 10;
};

struct MinimizeResult {
    Eigen::VectorXd x;
    double f = 0.0;
    bool converged = false;
    bool valid = false;  // false when f was non-finite at the start
};

// Projected-gradient L-BFGS on an axis-aligned box; steps are clipped to the
// box and accepted only on Armijo decrease, so iterates never leave the box
// and f never increases along a trajectory.
MinimizeResult lbfgs_box(const ObjectiveGrad& f, const Eigen::VectorXd& lower,
                         const Eigen::VectorXd& upper, const Eigen::VectorXd& x0,
                         const MinimizeOptions& opts = {});

// Multistart minimization on the unit hypercube: n_restarts LHS starts plus
// any extra starts (e.g. the incumbent best observed input). Starts with
// non-finite f are discarded; all discarded is an error. Ties in the final
// value go to the earliest start.
MinimizeResult minimize_bounded(const ObjectiveGrad& f, int dim, int n_restarts, Rng& rng,
                                const std::vector<Eigen::VectorXd>& extra_starts = {},
                                const MinimizeOptions& opts = {});

}  // namespace owbo
