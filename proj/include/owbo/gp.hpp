#pragma once

#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "owbo/core.hpp"
#include "owbo/kernel.hpp"

namespace owbo {

struct GpHyperparams {
    double mean_const;       // m0, fixed to the output mean during training
    RbfArd kernel;
    double noise_variance;   // sigma_eps^2 (learned, floored at 1e-8 by fit)
};

// training diagnostics: initial hyperparameters per restart and their
// log marginal likelihoods, plus the selected optimum's
struct FitReport {
    std::vector<GpHyperparams> starts;
    std::vector<double> start_lml;
    double final_lml = 0.0;
};

// Exact GP with constant mean. Immutable after construction; the Cholesky
// factor of K = k(X,X) + sigma_eps^2 I is cached (jitter ladder 1e-10..1e-4
// times sf2 on factorization failure, then TrainingError).
class GpModel {
public:
    GpModel(Dataset data, GpHyperparams hp);

    // maximizes the log marginal likelihood over log(sf2, lengthscales,
    // noise) with 8 restarts; m0 fixed to mean(y). Falls back to default
    // hyperparameters for n < 2 or constant outputs.
    static GpModel fit(const Dataset& data, Rng& rng, FitReport* report = nullptr);

    const GpHyperparams& hyperparams() const { return hp_; }
    const Dataset& data() const { return data_; }
    int size() const { return data_.size(); }
    int dim() const { return data_.dim(); }

    double posterior_mean(const Eigen::VectorXd& x) const;
    Eigen::VectorXd posterior_mean_grad(const Eigen::VectorXd& x) const;
    double posterior_var(const Eigen::VectorXd& x) const;
    Eigen::VectorXd posterior_var_grad(const Eigen::VectorXd& x) const;
    double posterior_cov(const Eigen::VectorXd& x, const Eigen::VectorXd& xp) const;

    // posterior variance at xp after a hypothetical observation at x:
    // var(xp) - cov(xp,x)^2 / (var(x) + sigma_eps^2), clamped at 0
    double lookahead_var(const Eigen::VectorXd& xp, const Eigen::VectorXd& x) const;

    // batch posterior mean over row-stacked points (chunked internally)
    Eigen::VectorXd posterior_mean_many(const Eigen::Ref<const Eigen::MatrixXd>& Xs) const;

    double log_marginal_likelihood() const { return lml_; }
    static double log_marginal_likelihood(const Dataset& data, const GpHyperparams& hp);

    // K^{-1} B through the cached factor
    Eigen::MatrixXd solve_K(const Eigen::Ref<const Eigen::MatrixXd>& B) const;
    const Eigen::MatrixXd& chol_lower() const { return L_; }
    const Eigen::VectorXd& alpha() const { return alpha_; }

private:
    GpHyperparams hp_;
    Dataset data_;
    Eigen::MatrixXd L_;      // lower factor of K (n x n)
    Eigen::VectorXd alpha_;  // K^{-1} (y - m0)
    double lml_ = 0.0;
};

}  // namespace owbo
