#pragma once

#include <functional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "owbo/core.hpp"
#include "owbo/gp.hpp"

namespace owbo {

// 1-D Gaussian KDE on an equispaced grid. Off-grid queries interpolate
// linearly and are floored at p_min = 1e-6 * max(density) so the likelihood
// ratio stays bounded.
struct Kde1d {
    Eigen::VectorXd grid;
    Eigen::VectorXd density;
    double bandwidth = 0.0;
    double floor = 0.0;

    double query(double y) const;
};

// posterior-mean values at points drawn from the input prior (unit coords)
Eigen::VectorXd sample_mu(const GpModel& model, const UnitPrior& prior, int n_samples,
                          Rng& rng);

// Linear binning + FFT convolution, Silverman bandwidth
// 0.9*min(std, IQR/1.34)*n^{-1/5}; grid spans [min-3h, max+3h]. Throws
// DegenerateDensity for zero-spread samples.
Kde1d kde_1d(const Eigen::VectorXd& samples, int grid_size = 1024);

// w(x) = p_x(x) / max(p_mu(mu(x)), p_min)
class LikelihoodRatio {
public:
    LikelihoodRatio(const GpModel& model, const UnitPrior& prior, Kde1d kde);
    double operator()(const Eigen::VectorXd& x) const;
    const Kde1d& kde() const { return kde_; }

private:
    const GpModel* model_;
    const UnitPrior* prior_;
    Kde1d kde_;
};

LikelihoodRatio likelihood_ratio(const GpModel& model, const UnitPrior& prior, Kde1d kde);

// Unnormalized mixture approximation of w: evaluate(x) =
// total_mass * sum_i alpha_i N(x; mean_i, cov_i), total_mass estimating
// the integral of w.
class GaussianMixture {
public:
    GaussianMixture(Eigen::VectorXd weights, std::vector<Eigen::VectorXd> means,
                    std::vector<Eigen::MatrixXd> covariances, double total_mass);

    double evaluate(const Eigen::VectorXd& x) const;
    Eigen::VectorXd evaluate_grad(const Eigen::VectorXd& x) const;

    int n_components() const { return static_cast<int>(weights_.size()); }
    int dim() const { return static_cast<int>(means_[0].size()); }
    const Eigen::VectorXd& weights() const { return weights_; }
    const std::vector<Eigen::VectorXd>& means() const { return means_; }
    const std::vector<Eigen::MatrixXd>& covariances() const { return covariances_; }
    double total_mass() const { return total_mass_; }
    GaussianMixture with_total_mass(double mass) const;

    // N(x; mean_i, cov_i)
    double component_density(int i, const Eigen::VectorXd& x) const;

private:
    Eigen::VectorXd weights_;
    std::vector<Eigen::VectorXd> means_;
    std::vector<Eigen::MatrixXd> covariances_;
    double total_mass_;
    std::vector<Eigen::LLT<Eigen::MatrixXd>> llts_;
    std::vector<double> log_norm_;  // -d/2 log(2 pi) - 1/2 log det
};

// Weighted EM (k-means++ init, <=200 iterations, tolerance 1e-6 on the
// weighted log-likelihood, eigenvalue floor 1e-6 on covariances). Components
// that collapse (weight < 1e-8 or repeated floor hits) are pruned and the fit
// restarts with n_gmm-1. total_mass = mean_s[ w(x_s)/p_sampling(x_s) ].
GaussianMixture fit_gmm(const std::function<double(const Eigen::VectorXd&)>& w,
                        const UnitPrior& prior, int n_gmm, int n_fit_samples, Rng& rng);

}  // namespace owbo
