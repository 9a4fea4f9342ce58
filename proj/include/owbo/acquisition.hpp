#pragma once

#include <Eigen/Dense>
#include <vector>

#include "owbo/acquisition_spec.hpp"
#include "owbo/density.hpp"
#include "owbo/gp.hpp"
#include "owbo/kernel.hpp"
#include "owbo/optim.hpp"

namespace owbo {

// Evaluates one acquisition rule against a fitted model, in unit-cube
// coordinates.  Weighted rules additionally take the mixture approximation
// of the likelihood ratio; the integral-variance family precomputes
// K^{-1} Khat K^{-1} once per construction so per-point evaluations stay
// O(n^2).  The model (and mixture, when given) must outlive the instance.
class Acquisition {
public:
    Acquisition(AcquisitionSpec spec, const GpModel& model,
                const GaussianMixture* mixture = nullptr);

    double value(const Eigen::VectorXd& x) const;
    double value_grad(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const;

    // sign-flipped for maximizing rules so every rule is minimized
    double minimization_value_and_grad(const Eigen::VectorXd& x,
                                       Eigen::VectorXd& grad) const;
    ObjectiveGrad as_min_objective() const;

    const AcquisitionSpec& spec() const { return spec_; }
    double best_observed() const { return best_y_; }

private:
    struct Eval {
        double mu = 0.0;
        double var = 0.0;
        Eigen::VectorXd kx;      // k(X, x)
        Eigen::VectorXd v;       // K^{-1} k(X, x)
        Eigen::MatrixXd W;       // rows X_i - x
        Eigen::MatrixXd J;       // d k(X_i, x) / dx, n x d
    };

    Eval evaluate_posterior(const Eigen::VectorXd& x, bool with_grad) const;
    double closed_form(const Eval& e, const Eigen::VectorXd& x, Eigen::VectorXd* grad) const;
    double integral_variance(const Eval& e, const Eigen::VectorXd& x,
                             Eigen::VectorXd* grad) const;
    double dispatch(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const;

    AcquisitionSpec spec_;
    const GpModel* model_;
    const GaussianMixture* mixture_;
    double best_y_ = 0.0;

    // integral-variance caches
    Eigen::MatrixXd C_;               // K^{-1} Khat K^{-1}, Khat mixed for LW
    std::vector<KhatGaussOp> ops_;    // one per mixture component
    Eigen::VectorXd beta_;            // total_mass * mixture weight
    double khat_const_ = 0.0;         // khat(x, x) for the unweighted kernel
};

}  // namespace owbo
