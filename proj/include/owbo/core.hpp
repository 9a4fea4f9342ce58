#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "owbo/acquisition_spec.hpp"
#include "owbo/rng.hpp"

namespace owbo {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// KDE/GMM pipeline cannot represent the data (e.g. zero-spread samples);
// callers fall back to the unweighted acquisition.
struct DegenerateDensity : Error {
    using Error::Error;
};

// surrogate training failed beyond repair (Cholesky breakdown after max jitter)
struct TrainingError : Error {
    using Error::Error;
};

struct IntegrationError : Error {
    IntegrationError(const std::string& msg, double t) : Error(msg), blow_up_time(t) {}
    double blow_up_time;
};

// Axis-aligned compact search box.
struct Domain {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    Domain(Eigen::VectorXd lo, Eigen::VectorXd hi);
    static Domain unit_cube(int d);

    int dim() const { return static_cast<int>(lower.size()); }
    double volume() const;
    bool contains(const Eigen::VectorXd& x, double slack = 1e-12) const;
};

Eigen::VectorXd rescale_to_unit(const Domain& domain, const Eigen::VectorXd& x);
Eigen::VectorXd unrescale(const Domain& domain, const Eigen::VectorXd& u);

// Ordered observations (x_i, y_i); rows of inputs() are points.
class Dataset {
public:
    explicit Dataset(Domain domain);

    void append(const Eigen::VectorXd& x, double y);

    int size() const { return n_; }
    int dim() const { return domain_.dim(); }
    const Domain& domain() const { return domain_; }
    // views limited to the filled rows
    Eigen::Ref<const Eigen::MatrixXd> inputs() const { return inputs_.topRows(n_); }
    Eigen::Ref<const Eigen::VectorXd> outputs() const { return outputs_.head(n_); }

private:
    Domain domain_;
    Eigen::MatrixXd inputs_;
    Eigen::VectorXd outputs_;
    int n_ = 0;
};

// Input prior p_x over the search domain, in original coordinates:
// Uniform(domain) or a zero-centered Gaussian with diagonal covariance Λ.
// Gaussian density is the plain N(0, Λ) pdf (no truncation renormalization);
// sampling is truncated to the domain.
class InputPrior {
public:
    enum class Kind { uniform, gaussian_diagonal };

    static InputPrior uniform(Domain domain);
    static InputPrior gaussian_diagonal(Domain domain, Eigen::VectorXd variances);

    Kind kind() const { return kind_; }
    const Domain& domain() const { return domain_; }
    const Eigen::VectorXd& variances() const { return variances_; }

    double density(const Eigen::VectorXd& x) const;
    // density normalized over the domain (truncated); used for importance weights
    double sampling_density(const Eigen::VectorXd& x) const;
    Eigen::VectorXd sample(Rng& rng) const;

private:
    InputPrior(Kind k, Domain d, Eigen::VectorXd v);
    Kind kind_;
    Domain domain_;
    Eigen::VectorXd variances_;  // gaussian only
    double truncated_mass_ = 1.0;
};

// The prior pushed forward to unit-cube coordinates (where the whole engine
// operates). Densities carry the affine Jacobian but not the truncation
// renormalization, so a Uniform prior becomes density == 1 on [0,1]^d and w's
// absolute scale matches the likelihood-ratio definition.
class UnitPrior {
public:
    UnitPrior(const InputPrior& prior, const Domain& domain);

    int dim() const { return d_; }
    double density(const Eigen::VectorXd& u) const;
    double sampling_density(const Eigen::VectorXd& u) const;
    Eigen::VectorXd sample(Rng& rng) const;

private:
    InputPrior::Kind kind_;
    int d_;
    // gaussian pushforward: per-dim mean/std in unit coordinates
    Eigen::VectorXd mean_u_, std_u_;
    double truncated_mass_ = 1.0;
};

// Everything a single experiment needs besides the objective callable.
struct ExperimentConfig {
    std::string objective = "ackley";
    int dim = 2;
    Domain domain = Domain::unit_cube(2);
    InputPrior prior = InputPrior::uniform(Domain::unit_cube(2));
    int n_init = 3;
    int n_iter = 60;
    AcquisitionSpec acquisition;
    double noise_variance = 1e-3;  // pre-rescaling sigma_eps^2
    int n_gmm = 2;
    int n_samples_kde = 100000;
    int n_fit_samples = 10000;
    std::uint64_t seed = 0;

    void validate() const;
};

}  // namespace owbo
