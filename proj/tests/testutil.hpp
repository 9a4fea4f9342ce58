#pragma once

// Independent reference computations for the test suite: finite differences,
// quadrature, Monte Carlo, and random model/mixture generators.

#include <Eigen/Dense>
#include <functional>

#include "owbo/density.hpp"
#include "owbo/gp.hpp"
#include "owbo/rng.hpp"

namespace testutil {

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

Eigen::VectorXd fd_gradient(const ScalarFn& f, const Eigen::VectorXd& x, double h = 1e-6);

double relative_error(double got, double want);

// max over coordinates of |got-want| / max(1e-8, |want|)
double gradient_relative_error(const Eigen::VectorXd& got, const Eigen::VectorXd& want);

// Gauss-Legendre nodes and weights transformed to [0, 1]
void gauss_legendre_unit(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

// tensor-product quadrature of f over [0,1]^d, d in {1, 2}
double integrate_unit_cube(const ScalarFn& f, int d, int n_1d);

struct McEstimate {
    double mean = 0.0;
    double se = 0.0;
};
// plain Monte Carlo average of f over supplied unit-cube samples (rows)
McEstimate mc_average(const ScalarFn& f, const Eigen::MatrixXd& samples);

// GP with random data and random (not fitted) hyperparameters on [0,1]^d
owbo::GpModel random_model(int d, int n, double noise_variance, owbo::Rng& rng);

// mixture with random SPD covariances, means inside [0,1]^d, random total mass
owbo::GaussianMixture random_mixture(int d, int k, owbo::Rng& rng);

}  // namespace testutil
