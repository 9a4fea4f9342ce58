#include "owbo/acquisition.hpp"

#include <cmath>
#include <stdexcept>

namespace owbo {

namespace {

constexpr double kVarFloor = 1e-12;

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

Acquisition::Acquisition(AcquisitionSpec spec, const GpModel& model,
                         const GaussianMixture* mixture)
    : spec_(spec), model_(&model), mixture_(mixture) {
    if (spec_.weighted() && mixture_ == nullptr)
        throw std::invalid_argument("Acquisition: weighted rule needs a mixture");
    if (spec_.weighted() && mixture_->dim() != model.dim())
        throw std::invalid_argument("Acquisition: mixture dimension mismatch");

    const int n = model.size();
    best_y_ = n > 0 ? model.data().outputs().minCoeff() : model.hyperparams().mean_const;

    if (!spec_.integral_family()) return;

    const auto& kernel = model.hyperparams().kernel;
    khat_const_ = khat_self(kernel);

    Eigen::MatrixXd khat_xx;
    if (spec_.weighted()) {
        beta_.resize(mixture_->n_components());
        ops_.reserve(mixture_->n_components());
        khat_xx = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < mixture_->n_components(); ++i) {
            beta_[i] = mixture_->total_mass() * mixture_->weights()[i];
            ops_.emplace_back(kernel,
                              GaussComponent{mixture_->means()[i], mixture_->covariances()[i]});
            if (n > 0)
                khat_xx += beta_[i] * ops_.back().matrix(model.data().inputs(),
                                                         model.data().inputs());
        }
    } else if (n > 0) {
        khat_xx = khat_matrix(model.data().inputs(), model.data().inputs(), kernel);
    }
    if (n > 0) C_ = model.solve_K(model.solve_K(khat_xx).transpose());
}

Acquisition::Eval Acquisition::evaluate_posterior(const Eigen::VectorXd& x,
                                                  bool with_grad) const {
    const auto& hp = model_->hyperparams();
    Eval e;
    const int n = model_->size();
    if (n == 0) {
        e.mu = hp.mean_const;
        e.var = hp.kernel.signal_variance;
        e.kx.resize(0);
        e.v.resize(0);
        return e;
    }
    e.kx = hp.kernel.vector(model_->data().inputs(), x);
    e.v = model_->solve_K(e.kx);
    e.mu = hp.mean_const + e.kx.dot(model_->alpha());
    e.var = std::max(0.0, hp.kernel.signal_variance - e.kx.dot(e.v));
    if (with_grad) {
        e.W = model_->data().inputs().rowwise() - x.transpose();
        e.J = ((e.W.array().colwise() * e.kx.array()).rowwise() /
               hp.kernel.lengthscales.transpose().array())
                  .matrix();
    }
    return e;
}

double Acquisition::closed_form(const Eval& e, const Eigen::VectorXd& x,
                                Eigen::VectorXd* grad) const {
    const double var = std::max(e.var, kVarFloor);
    const double sigma = std::sqrt(var);
    const int n = model_->size();

    Eigen::VectorXd dmu, dvar;
    if (grad) {
        if (n > 0) {
            dmu = e.J.transpose() * model_->alpha();
            dvar = -2.0 * e.J.transpose() * e.v;
        } else {
            dmu = Eigen::VectorXd::Zero(x.size());
            dvar = Eigen::VectorXd::Zero(x.size());
        }
    }

    switch (spec_.kind) {
        case AcqKind::pi: {
            const double lam = (best_y_ - e.mu - spec_.xi) / sigma;
            if (grad) {
                const Eigen::VectorXd dsigma = dvar / (2.0 * sigma);
                const Eigen::VectorXd dlam = (-dmu - lam * dsigma) / sigma;
                *grad = normal_pdf(lam) * dlam;
            }
            return normal_cdf(lam);
        }
        case AcqKind::ei: {
            const double lam = (best_y_ - e.mu - spec_.xi) / sigma;
            const double cdf = normal_cdf(lam);
            const double pdf = normal_pdf(lam);
            if (grad) {
                const Eigen::VectorXd dsigma = dvar / (2.0 * sigma);
                const Eigen::VectorXd dlam = (-dmu - lam * dsigma) / sigma;
                *grad = dsigma * (lam * cdf + pdf) + sigma * cdf * dlam;
            }
            return sigma * (lam * cdf + pdf);
        }
        case AcqKind::lcb: {
            if (grad) *grad = dmu - spec_.kappa * dvar / (2.0 * sigma);
            return e.mu - spec_.kappa * sigma;
        }
        case AcqKind::lcb_lw: {
            const double w = mixture_->evaluate(x);
            if (grad) {
                const Eigen::VectorXd dw = mixture_->evaluate_grad(x);
                *grad = dmu - spec_.kappa * (w * dvar / (2.0 * sigma) + sigma * dw);
            }
            return e.mu - spec_.kappa * sigma * w;
        }
        default:
            throw std::logic_error("closed_form: not a closed-form rule");
    }
}

double Acquisition::integral_variance(const Eval& e, const Eigen::VectorXd& x,
                                      Eigen::VectorXd* grad) const {
    const int n = model_->size();
    const int d = static_cast<int>(x.size());
    const auto& kernel = model_->hyperparams().kernel;
    const bool lw = spec_.weighted();

    // self term khat(x, x), weighted across components for LW
    double self = 0.0;
    Eigen::VectorXd dself = Eigen::VectorXd::Zero(d);
    if (lw) {
        for (size_t i = 0; i < ops_.size(); ++i) {
            const double val = beta_[i] * ops_[i].value(x, x);
            self += val;
            if (grad) dself -= val * ops_[i].solve_shifted(x - ops_[i].mean());
        }
    } else {
        self = khat_const_;
    }

    double q = self;
    Eigen::VectorXd dq = dself;
    Eigen::VectorXd ckx, khat_x, u;
    if (n > 0) {
        // khat(X, x), weighted for LW
        khat_x = Eigen::VectorXd::Zero(n);
        if (lw) {
            for (size_t i = 0; i < ops_.size(); ++i)
                khat_x += beta_[i] * ops_[i].vector(model_->data().inputs(), x);
        } else {
            khat_x = khat_vector(model_->data().inputs(), x, kernel);
        }
        ckx = C_ * e.kx;
        u = model_->solve_K(khat_x);
        q += e.kx.dot(ckx) - 2.0 * e.v.dot(khat_x);

        if (grad) {
            // d khat(X_j, x)/dx rows; for LW each component adds its own
            // mean-shift term through the shifted solve
            Eigen::MatrixXd jhat(n, d);
            if (lw) {
                jhat.setZero();
                for (size_t i = 0; i < ops_.size(); ++i) {
                    const Eigen::VectorXd ki =
                        ops_[i].vector(model_->data().inputs(), x);
                    Eigen::MatrixXd m =
                        ((model_->data().inputs().rowwise() + x.transpose()) / 2.0).rowwise() -
                        ops_[i].mean().transpose();
                    const Eigen::MatrixXd s = ops_[i].solve_shifted(m.transpose());
                    const Eigen::MatrixXd rows =
                        ((e.W.array().rowwise() /
                          (2.0 * kernel.lengthscales.transpose().array())) -
                         0.5 * s.transpose().array())
                            .matrix();
                    jhat += beta_[i] * (rows.array().colwise() * ki.array()).matrix();
                }
            } else {
                jhat = ((e.W.array().rowwise() /
                         (2.0 * kernel.lengthscales.transpose().array()))
                            .colwise() *
                        khat_x.array())
                           .matrix();
            }
            dq += 2.0 * e.J.transpose() * ckx -
                  2.0 * (e.J.transpose() * u + jhat.transpose() * e.v);
        }
    }

    const double var = std::max(e.var, kVarFloor);
    const double a = q / var;
    if (grad) {
        Eigen::VectorXd dvar = Eigen::VectorXd::Zero(d);
        if (n > 0) dvar = -2.0 * e.J.transpose() * e.v;
        *grad = (dq - a * dvar) / var;
    }

    if (spec_.kind == AcqKind::ivr || spec_.kind == AcqKind::ivr_lw) return a;

    // ivr_bo / ivr_lwbo: mu - kappa * a
    Eigen::VectorXd dmu = Eigen::VectorXd::Zero(d);
    if (grad && n > 0) dmu = e.J.transpose() * model_->alpha();
    if (grad) *grad = dmu - spec_.kappa * (*grad);
    return e.mu - spec_.kappa * a;
}

double Acquisition::dispatch(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const {
    if (x.size() != model_->dim())
        throw std::invalid_argument("Acquisition: dimension mismatch");
    const Eval e = evaluate_posterior(x, grad != nullptr);
    return spec_.integral_family() ? integral_variance(e, x, grad)
                                   : closed_form(e, x, grad);
}

double Acquisition::value(const Eigen::VectorXd& x) const { return dispatch(x, nullptr); }

double Acquisition::value_grad(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
    return dispatch(x, &grad);
}

double Acquisition::minimization_value_and_grad(const Eigen::VectorXd& x,
                                                Eigen::VectorXd& grad) const {
    const double f = dispatch(x, &grad);
    if (spec_.maximize()) {
        grad = -grad;
        return -f;
    }
    return f;
}

ObjectiveGrad Acquisition::as_min_objective() const {
    return [this](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        return minimization_value_and_grad(x, grad);
    };
}

}  // namespace owbo
