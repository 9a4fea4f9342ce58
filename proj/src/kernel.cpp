#include "owbo/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace owbo {

namespace {

void check_dims(const Eigen::VectorXd& a, const Eigen::VectorXd& b, int d) {
    if (a.size() != d || b.size() != d)
        throw std::invalid_argument("kernel: dimension mismatch");
}

// pairwise squared distances of row-scaled point sets, clamped at 0
Eigen::MatrixXd scaled_sqdist(const Eigen::Ref<const Eigen::MatrixXd>& A,
                              const Eigen::Ref<const Eigen::MatrixXd>& B,
                              const Eigen::VectorXd& inv_scale_sqrt) {
    const Eigen::MatrixXd As = A * inv_scale_sqrt.asDiagonal();
    const Eigen::MatrixXd Bs = B * inv_scale_sqrt.asDiagonal();
    const Eigen::VectorXd an = As.rowwise().squaredNorm();
    const Eigen::VectorXd bn = Bs.rowwise().squaredNorm();
    Eigen::MatrixXd D = (-2.0 * As * Bs.transpose());
    D.colwise() += an;
    D.rowwise() += bn.transpose();
    return D.cwiseMax(0.0);
}

}  // namespace

RbfArd::RbfArd(double sf2, Eigen::VectorXd theta)
    : signal_variance(sf2), lengthscales(std::move(theta)) {
    if (!(signal_variance > 0.0))
        throw std::invalid_argument("RbfArd: signal variance must be positive");
    if (lengthscales.size() < 1 || (lengthscales.array() <= 0.0).any())
        throw std::invalid_argument("RbfArd: lengthscales must be positive");
}

double RbfArd::operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& xp) const {
    check_dims(x, xp, dim());
    const Eigen::ArrayXd diff = (x - xp).array();
    return signal_variance * std::exp(-0.5 * (diff.square() / lengthscales.array()).sum());
}

Eigen::VectorXd RbfArd::grad_x(const Eigen::VectorXd& x, const Eigen::VectorXd& xp) const {
    const double val = (*this)(x, xp);
    return -val * ((x - xp).array() / lengthscales.array()).matrix();
}

Eigen::MatrixXd RbfArd::matrix(const Eigen::Ref<const Eigen::MatrixXd>& A,
                               const Eigen::Ref<const Eigen::MatrixXd>& B) const {
    const Eigen::VectorXd inv_sqrt = lengthscales.array().rsqrt().matrix();
    return signal_variance * (-0.5 * scaled_sqdist(A, B, inv_sqrt).array()).exp();
}

Eigen::VectorXd RbfArd::vector(const Eigen::Ref<const Eigen::MatrixXd>& A,
                               const Eigen::VectorXd& x) const {
    Eigen::ArrayXXd diff = A.rowwise() - x.transpose();
    diff = diff.square().rowwise() / lengthscales.transpose().array();
    return signal_variance * (-0.5 * diff.rowwise().sum()).exp();
}

double khat_self(const RbfArd& params) {
    const int d = params.dim();
    return params.signal_variance * params.signal_variance *
           std::pow(M_PI, 0.5 * d) * std::sqrt(params.lengthscales.prod());
}

double khat(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2, const RbfArd& params) {
    check_dims(x1, x2, params.dim());
    const Eigen::ArrayXd diff = (x1 - x2).array();
    return khat_self(params) *
           std::exp(-0.25 * (diff.square() / params.lengthscales.array()).sum());
}

Eigen::VectorXd khat_grad_x1(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                             const RbfArd& params) {
    const double val = khat(x1, x2, params);
    return -val * ((x1 - x2).array() / (2.0 * params.lengthscales.array())).matrix();
}

Eigen::MatrixXd khat_matrix(const Eigen::Ref<const Eigen::MatrixXd>& A,
                            const Eigen::Ref<const Eigen::MatrixXd>& B, const RbfArd& params) {
    const Eigen::VectorXd inv_sqrt = (2.0 * params.lengthscales).array().rsqrt().matrix();
    return khat_self(params) * (-0.5 * scaled_sqdist(A, B, inv_sqrt).array()).exp();
}

Eigen::VectorXd khat_vector(const Eigen::Ref<const Eigen::MatrixXd>& A,
                            const Eigen::VectorXd& x, const RbfArd& params) {
    Eigen::ArrayXXd diff = A.rowwise() - x.transpose();
    diff = diff.square().rowwise() / params.lengthscales.transpose().array();
    return khat_self(params) * (-0.25 * diff.rowwise().sum()).exp();
}

KhatGaussOp::KhatGaussOp(const RbfArd& params, const GaussComponent& comp)
    : theta_(params.lengthscales), mean_(comp.mean) {
    const int d = params.dim();
    if (comp.mean.size() != d || comp.cov.rows() != d || comp.cov.cols() != d)
        throw std::invalid_argument("khat_gauss: dimension mismatch");

    diagonal_ = true;
    for (int i = 0; i < d && diagonal_; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j && comp.cov(i, j) != 0.0) {
                diagonal_ = false;
                break;
            }

    const Eigen::VectorXd half_theta = 0.5 * theta_;
    double log_det_shifted;
    if (diagonal_) {
        shifted_diag_ = half_theta + comp.cov.diagonal();
        if ((comp.cov.diagonal().array() <= 0.0).any())
            throw std::invalid_argument("khat_gauss: covariance not positive definite");
        log_det_shifted = shifted_diag_.array().log().sum();
    } else {
        Eigen::MatrixXd shifted = comp.cov;
        shifted.diagonal() += half_theta;
        llt_.compute(shifted);
        if (llt_.info() != Eigen::Success)
            throw std::invalid_argument("khat_gauss: covariance not positive definite");
        log_det_shifted = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
    }
    const double log_det_half_theta = half_theta.array().log().sum();
    prefactor_ = params.signal_variance * params.signal_variance *
                 std::exp(0.5 * (log_det_half_theta - log_det_shifted));
}

Eigen::MatrixXd KhatGaussOp::solve_shifted(const Eigen::Ref<const Eigen::MatrixXd>& V) const {
    if (diagonal_) return shifted_diag_.cwiseInverse().asDiagonal() * V;
    return llt_.solve(V);
}

double KhatGaussOp::value(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2) const {
    const Eigen::VectorXd diff = x1 - x2;
    const Eigen::VectorXd dm = 0.5 * (x1 + x2) - mean_;
    const double q1 = (diff.array().square() / theta_.array()).sum();
    const Eigen::VectorXd sdm = solve_shifted(dm);
    const double q2 = dm.dot(sdm);
    return prefactor_ * std::exp(-0.25 * q1 - 0.5 * q2);
}

Eigen::VectorXd KhatGaussOp::grad_x1(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2) const {
    const double val = value(x1, x2);
    const Eigen::VectorXd dm = 0.5 * (x1 + x2) - mean_;
    return val * (-((x1 - x2).array() / (2.0 * theta_.array())).matrix() -
                  0.5 * solve_shifted(dm));
}

Eigen::VectorXd KhatGaussOp::vector(const Eigen::Ref<const Eigen::MatrixXd>& A,
                                    const Eigen::VectorXd& x) const {
    const Eigen::ArrayXXd diff = (A.rowwise() - x.transpose()).array();
    const Eigen::ArrayXd q1 =
        (diff.square().rowwise() / theta_.transpose().array()).rowwise().sum();
    Eigen::MatrixXd M = 0.5 * (A.rowwise() + x.transpose());
    M.rowwise() -= mean_.transpose();
    const Eigen::MatrixXd Z = solve_shifted(M.transpose());  // d x n
    const Eigen::ArrayXd q2 = (M.array() * Z.transpose().array()).rowwise().sum();
    return prefactor_ * (-0.25 * q1 - 0.5 * q2).exp();
}

Eigen::MatrixXd KhatGaussOp::matrix(const Eigen::Ref<const Eigen::MatrixXd>& A,
                                    const Eigen::Ref<const Eigen::MatrixXd>& B) const {
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(B.rows());
    Eigen::MatrixXd out(n, m);
    for (int j = 0; j < m; ++j) out.col(j) = vector(A, B.row(j).transpose());
    return out;
}

double khat_gauss(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2, const RbfArd& params,
                  const GaussComponent& comp) {
    return KhatGaussOp(params, comp).value(x1, x2);
}

Eigen::VectorXd khat_gauss_grad_x1(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                                   const RbfArd& params, const GaussComponent& comp) {
    return KhatGaussOp(params, comp).grad_x1(x1, x2);
}

}  // namespace owbo
