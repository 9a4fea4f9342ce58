#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace owbo {

// RBF kernel with automatic relevance determination,
//   k(x,x') = sf2 * exp(-(x-x')' Theta^-1 (x-x') / 2),
// Theta diagonal; lengthscales holds the diagonal of Theta (squared-length
// units: d=1, Theta=1, |x-x'|=sqrt(2) gives exp(-1)).
struct RbfArd {
    double signal_variance;
    Eigen::VectorXd lengthscales;

    RbfArd(double sf2, Eigen::VectorXd theta);

    int dim() const { return static_cast<int>(lengthscales.size()); }
    double operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& xp) const;
    Eigen::VectorXd grad_x(const Eigen::VectorXd& x, const Eigen::VectorXd& xp) const;

    // cross-covariance over row-stacked points, k(A_i, B_j)
    Eigen::MatrixXd matrix(const Eigen::Ref<const Eigen::MatrixXd>& A,
                           const Eigen::Ref<const Eigen::MatrixXd>& B) const;
    Eigen::VectorXd vector(const Eigen::Ref<const Eigen::MatrixXd>& A,
                           const Eigen::VectorXd& x) const;
};

// Full-space integral of a kernel product,
//   khat(x1,x2) = ∫ k(x1,x') k(x',x2) dx'  over R^d
//               = sf2^2 pi^{d/2} |Theta|^{1/2} exp(-(x1-x2)' (4 Theta)^-1 (x1-x2))
// (closed form; quadrature-verified in the test suite).
double khat(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2, const RbfArd& params);
Eigen::VectorXd khat_grad_x1(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                             const RbfArd& params);
Eigen::MatrixXd khat_matrix(const Eigen::Ref<const Eigen::MatrixXd>& A,
                            const Eigen::Ref<const Eigen::MatrixXd>& B, const RbfArd& params);
Eigen::VectorXd khat_vector(const Eigen::Ref<const Eigen::MatrixXd>& A,
                            const Eigen::VectorXd& x, const RbfArd& params);
// khat(x,x), independent of x
double khat_self(const RbfArd& params);

struct GaussComponent {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

// Gaussian-weighted kernel-product integral
//   ∫ k(x1,x') k(x',x2) N(x'; mean, cov) dx'
// evaluated through a cached Cholesky of (Theta/2 + cov), with a diagonal
// fast path. Throws std::invalid_argument when cov is not SPD.
class KhatGaussOp {
public:
    KhatGaussOp(const RbfArd& params, const GaussComponent& comp);

    double value(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2) const;
    Eigen::VectorXd grad_x1(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2) const;

    // [value(A_r, x)]_r over row-stacked points
    Eigen::VectorXd vector(const Eigen::Ref<const Eigen::MatrixXd>& A,
                           const Eigen::VectorXd& x) const;
    Eigen::MatrixXd matrix(const Eigen::Ref<const Eigen::MatrixXd>& A,
                           const Eigen::Ref<const Eigen::MatrixXd>& B) const;

    // (Theta/2 + cov)^{-1} V
    Eigen::MatrixXd solve_shifted(const Eigen::Ref<const Eigen::MatrixXd>& V) const;
    const Eigen::VectorXd& mean() const { return mean_; }

private:
    Eigen::VectorXd theta_;
    Eigen::VectorXd mean_;
    double prefactor_;  // sf2^2 sqrt(det(Theta/2)/det(Theta/2+cov))
    bool diagonal_;
    Eigen::VectorXd shifted_diag_;      // diagonal path: Theta/2 + diag(cov)
    Eigen::LLT<Eigen::MatrixXd> llt_;   // full path: chol(Theta/2 + cov)
};

double khat_gauss(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2, const RbfArd& params,
                  const GaussComponent& comp);
Eigen::VectorXd khat_gauss_grad_x1(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                                   const RbfArd& params, const GaussComponent& comp);

}  // namespace owbo
