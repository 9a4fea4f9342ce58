#include "owbo/gp.hpp"

#include <cmath>
#include <limits>

#include "owbo/optim.hpp"

namespace owbo {

namespace {

constexpr double kNoiseFloor = 1e-8;

// population variance
double var_of(const Eigen::VectorXd& y) {
    if (y.size() == 0) return 0.0;
    const Eigen::ArrayXd c = y.array() - y.mean();
    return c.square().mean();
}

bool effectively_constant(const Eigen::VectorXd& y) {
    if (y.size() == 0) return true;
    const double spread = y.maxCoeff() - y.minCoeff();
    return spread <= 1e-12 * std::max(1.0, y.cwiseAbs().maxCoeff());
}

GpHyperparams fallback_hyperparams(const Eigen::VectorXd& y, int d) {
    const double m0 = y.size() ? y.mean() : 0.0;
    const double v = var_of(y);
    const double sf2 = v > 0.0 ? v : 1.0;
    return GpHyperparams{m0, RbfArd(sf2, Eigen::VectorXd::Constant(d, 0.09)), kNoiseFloor};
}

// Training parameterization: p = [log sf2, log ell_1..d, log noise],
// Theta_i = ell_i^2.
struct TrainContext {
    const Eigen::MatrixXd X;
    const Eigen::VectorXd r;  // y - m0
    std::vector<Eigen::MatrixXd> sqdist;  // per-dimension squared differences

    TrainContext(const Dataset& data, double m0)
        : X(data.inputs()), r(data.outputs().array() - m0) {
        const int n = static_cast<int>(X.rows());
        sqdist.reserve(X.cols());
        for (int j = 0; j < X.cols(); ++j) {
            Eigen::MatrixXd D(n, n);
            for (int b = 0; b < n; ++b)
                D.col(b) = (X.col(j).array() - X(b, j)).square().matrix();
            sqdist.push_back(std::move(D));
        }
    }

    // negative log marginal likelihood and gradient in log-parameters
    double nlml(const Eigen::VectorXd& p, Eigen::VectorXd& grad) const {
        const int n = static_cast<int>(X.rows());
        const int d = static_cast<int>(X.cols());
        const double sf2 = std::exp(p[0]);
        Eigen::VectorXd theta(d);
        for (int j = 0; j < d; ++j) theta[j] = std::exp(2.0 * p[1 + j]);
        const double noise = std::exp(p[d + 1]);

        Eigen::MatrixXd Kf = Eigen::MatrixXd::Zero(n, n);
        for (int j = 0; j < d; ++j) Kf += sqdist[j] / theta[j];
        Kf = sf2 * (-0.5 * Kf.array()).exp();
        Eigen::MatrixXd K = Kf;
        K.diagonal().array() += noise;

        Eigen::LLT<Eigen::MatrixXd> llt(K);
        grad.setZero(p.size());
        if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();

        const Eigen::VectorXd alpha = llt.solve(r);
        const double lml = -0.5 * r.dot(alpha) -
                           llt.matrixLLT().diagonal().array().log().sum() -
                           0.5 * n * std::log(2.0 * M_PI);

        // P = alpha alpha' - K^{-1}; d lml / d theta_j = tr(P dK/dtheta_j)/2
        Eigen::MatrixXd P = -llt.solve(Eigen::MatrixXd::Identity(n, n));
        P.noalias() += alpha * alpha.transpose();

        grad[0] = -0.5 * P.cwiseProduct(Kf).sum();                      // log sf2
        for (int j = 0; j < d; ++j)                                     // log ell_j
            grad[1 + j] = -0.5 * P.cwiseProduct(Kf.cwiseProduct(sqdist[j])).sum() / theta[j];
        grad[d + 1] = -0.5 * noise * P.trace();                         // log noise
        return -lml;
    }
};

}  // namespace

GpModel::GpModel(Dataset data, GpHyperparams hp) : hp_(std::move(hp)), data_(std::move(data)) {
    const int n = data_.size();
    if (n > 0 && data_.dim() != hp_.kernel.dim())
        throw std::invalid_argument("GpModel: kernel dimension mismatch");
    if (hp_.noise_variance < 0.0)
        throw std::invalid_argument("GpModel: negative noise variance");
    if (n == 0) return;

    Eigen::MatrixXd K = hp_.kernel.matrix(data_.inputs(), data_.inputs());
    K.diagonal().array() += hp_.noise_variance;

    Eigen::LLT<Eigen::MatrixXd> llt(K);
    double jitter = 1e-10 * hp_.kernel.signal_variance;
    const double max_jitter = 1e-4 * hp_.kernel.signal_variance;
    while (llt.info() != Eigen::Success) {
        if (jitter > max_jitter)
            throw TrainingError("GpModel: Cholesky failed at maximum jitter");
        Eigen::MatrixXd Kj = K;
        Kj.diagonal().array() += jitter;
        llt.compute(Kj);
        jitter *= 10.0;
    }
    L_ = llt.matrixL();
    const Eigen::VectorXd r = data_.outputs().array() - hp_.mean_const;
    alpha_ = llt.solve(r);
    lml_ = -0.5 * r.dot(alpha_) - L_.diagonal().array().log().sum() -
           0.5 * n * std::log(2.0 * M_PI);
}

GpModel GpModel::fit(const Dataset& data, Rng& rng, FitReport* report) {
    const int n = data.size();
    const int d = data.dim();
    const Eigen::VectorXd y = data.outputs();

    if (n < 2 || effectively_constant(y))
        return GpModel(data, fallback_hyperparams(y, d));

    const double m0 = y.mean();
    const double v = var_of(y);
    TrainContext ctx(data, m0);

    Eigen::VectorXd lb(d + 2), ub(d + 2);
    lb[0] = std::log(1e-4 * v);
    ub[0] = std::log(1e2 * v);
    for (int j = 0; j < d; ++j) {
        lb[1 + j] = std::log(1e-3);
        ub[1 + j] = std::log(10.0);
    }
    lb[d + 1] = std::log(kNoiseFloor);
    ub[d + 1] = std::log(std::max(10.0 * v, 1e-7));

    auto objective = [&ctx](const Eigen::VectorXd& p, Eigen::VectorXd& g) {
        return ctx.nlml(p, g);
    };

    std::vector<Eigen::VectorXd> starts;
    Eigen::VectorXd p0(d + 2);
    p0[0] = std::log(v);
    for (int j = 0; j < d; ++j) p0[1 + j] = std::log(0.3);
    p0[d + 1] = std::log(std::max(1e-4 * v, kNoiseFloor));
    starts.push_back(p0.cwiseMax(lb).cwiseMin(ub));
    for (int s = 1; s < 8; ++s) {
        Eigen::VectorXd p(d + 2);
        p[0] = std::log(v) + rng.uniform(std::log(0.1), std::log(10.0));
        for (int j = 0; j < d; ++j) p[1 + j] = rng.uniform(std::log(0.03), std::log(3.0));
        p[d + 1] = rng.uniform(std::log(kNoiseFloor), std::log(std::max(0.1 * v, 1e-7)));
        starts.push_back(p.cwiseMax(lb).cwiseMin(ub));
    }

    MinimizeOptions opts;
    opts.max_iters = 100;

    auto to_hp = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd theta(d);
        for (int j = 0; j < d; ++j) theta[j] = std::exp(2.0 * p[1 + j]);
        return GpHyperparams{m0, RbfArd(std::exp(p[0]), theta),
                             std::max(std::exp(p[d + 1]), kNoiseFloor)};
    };

    bool any = false;
    double best_nlml = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_p;
    Eigen::VectorXd g(d + 2);
    for (const auto& p : starts) {
        if (report) {
            report->starts.push_back(to_hp(p));
            report->start_lml.push_back(-ctx.nlml(p, g));
        }
        MinimizeResult r = lbfgs_box(objective, lb, ub, p, opts);
        if (r.valid && r.f < best_nlml) {
            best_nlml = r.f;
            best_p = r.x;
            any = true;
        }
    }
    if (!any) throw TrainingError("GpModel::fit: marginal likelihood non-finite at all starts");
    if (report) report->final_lml = -best_nlml;
    return GpModel(data, to_hp(best_p));
}

double GpModel::posterior_mean(const Eigen::VectorXd& x) const {
    if (data_.size() == 0) return hp_.mean_const;
    return hp_.mean_const + hp_.kernel.vector(data_.inputs(), x).dot(alpha_);
}

Eigen::VectorXd GpModel::posterior_mean_grad(const Eigen::VectorXd& x) const {
    const int d = hp_.kernel.dim();
    if (data_.size() == 0) return Eigen::VectorXd::Zero(d);
    const Eigen::VectorXd kx = hp_.kernel.vector(data_.inputs(), x);
    const Eigen::VectorXd c = kx.cwiseProduct(alpha_);
    const Eigen::MatrixXd W = data_.inputs().rowwise() - x.transpose();  // rows X_i - x
    return (W.transpose() * c).cwiseQuotient(hp_.kernel.lengthscales);
}

double GpModel::posterior_var(const Eigen::VectorXd& x) const {
    if (data_.size() == 0) return hp_.kernel.signal_variance;
    const Eigen::VectorXd kx = hp_.kernel.vector(data_.inputs(), x);
    const Eigen::VectorXd v = L_.triangularView<Eigen::Lower>().solve(kx);
    return std::max(0.0, hp_.kernel.signal_variance - v.squaredNorm());
}

Eigen::VectorXd GpModel::posterior_var_grad(const Eigen::VectorXd& x) const {
    const int d = hp_.kernel.dim();
    if (data_.size() == 0) return Eigen::VectorXd::Zero(d);
    const Eigen::VectorXd kx = hp_.kernel.vector(data_.inputs(), x);
    const Eigen::VectorXd v = solve_K(kx);
    const Eigen::MatrixXd W = data_.inputs().rowwise() - x.transpose();
    // d var/dx = -2 J' K^{-1} k_x with J_i = k_x_i (X_i - x)/Theta
    return -2.0 * (W.transpose() * v.cwiseProduct(kx)).cwiseQuotient(hp_.kernel.lengthscales);
}

double GpModel::posterior_cov(const Eigen::VectorXd& x, const Eigen::VectorXd& xp) const {
    if (data_.size() == 0) return hp_.kernel(x, xp);
    const Eigen::VectorXd vx =
        L_.triangularView<Eigen::Lower>().solve(hp_.kernel.vector(data_.inputs(), x));
    const Eigen::VectorXd vp =
        L_.triangularView<Eigen::Lower>().solve(hp_.kernel.vector(data_.inputs(), xp));
    return hp_.kernel(x, xp) - vx.dot(vp);
}

double GpModel::lookahead_var(const Eigen::VectorXd& xp, const Eigen::VectorXd& x) const {
    const double var_xp = posterior_var(xp);
    const double denom = posterior_var(x) + hp_.noise_variance;
    if (denom <= 0.0) return var_xp;  // var(x)=0 forces cov(xp,x)=0
    const double c = posterior_cov(xp, x);
    return std::max(0.0, var_xp - c * c / denom);
}

Eigen::VectorXd GpModel::posterior_mean_many(const Eigen::Ref<const Eigen::MatrixXd>& Xs) const {
    const int m = static_cast<int>(Xs.rows());
    Eigen::VectorXd out = Eigen::VectorXd::Constant(m, hp_.mean_const);
    if (data_.size() == 0) return out;
    constexpr int chunk = 8192;
    for (int start = 0; start < m; start += chunk) {
        const int len = std::min(chunk, m - start);
        out.segment(start, len) +=
            hp_.kernel.matrix(Xs.middleRows(start, len), data_.inputs()) * alpha_;
    }
    return out;
}

double GpModel::log_marginal_likelihood(const Dataset& data, const GpHyperparams& hp) {
    return GpModel(data, hp).log_marginal_likelihood();
}

Eigen::MatrixXd GpModel::solve_K(const Eigen::Ref<const Eigen::MatrixXd>& B) const {
    Eigen::MatrixXd Z = L_.triangularView<Eigen::Lower>().solve(B);
    return L_.transpose().triangularView<Eigen::Upper>().solve(Z);
}

}  // namespace owbo
