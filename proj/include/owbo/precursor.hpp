#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "owbo/core.hpp"

namespace owbo {

// Three-state system with rare large excursions in z; the origin and
// (-1, 0, 0) are equilibria and the z = 0 plane is invariant.
struct DynSystem {
    double alpha = 0.01;
    double omega = 2.0 * M_PI;
    double lambda = 0.1;
    double beta = 0.1;
    double dt = 0.01;

    Eigen::Vector3d rhs(const Eigen::Vector3d& s) const;
};

struct Trajectory {
    double dt = 0.0;
    std::vector<Eigen::Vector3d> states;  // states[i] at time i * dt, includes t = 0 and t = tau
};

// classical fixed-step 4th-order integration; tau must be a multiple of dt
Trajectory integrate(const DynSystem& system, const Eigen::Vector3d& x0, double tau);

// max of z(t) over the sampled trajectory
double danger(const DynSystem& system, const Eigen::Vector3d& x0, double tau);

struct PcaSubspace {
    Eigen::Vector3d mean;
    Eigen::Matrix<double, 2, 3> components;  // orthonormal rows, leading first
    Eigen::Vector2d eigenvalues;             // positive, descending
};

// top-2 PCA of a 3-D sample cloud
PcaSubspace pca_top2(const std::vector<Eigen::Vector3d>& samples);

// run one long trajectory, discard burn-in, sample every `stride`, PCA the
// rest; the background attractor roughly spans the (x, y) plane, asserted as
// |e_z . component_i| <= 0.3
PcaSubspace build_subspace(const DynSystem& system, double burn_in, double sample_T,
                           double stride);

// BO problem over 2-D subspace coefficients a: x0 = mean + a^T components,
// objective -danger(x0), box |a_i| <= 4 sqrt(eigenvalue_i), Gaussian prior
// N(0, diag(eigenvalues))
struct PrecursorProblem {
    std::function<double(const Eigen::VectorXd&)> objective;
    Domain domain = Domain::unit_cube(2);
    InputPrior prior = InputPrior::uniform(Domain::unit_cube(2));
};

PrecursorProblem precursor_objective(const PcaSubspace& subspace, const DynSystem& system,
                                     double tau);

}  // namespace owbo
