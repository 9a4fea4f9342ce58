#include "owbo/precursor.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace owbo {

Eigen::Vector3d DynSystem::rhs(const Eigen::Vector3d& s) const {
    const double x = s[0], y = s[1], z = s[2];
    Eigen::Vector3d out;
    out[0] = alpha * x + omega * y + alpha * x * x + 2.0 * omega * x * y + z * z;
    out[1] = -omega * x + alpha * y - omega * x * x + 2.0 * alpha * x * y;
    out[2] = -lambda * z - (lambda + beta) * x * z;
    return out;
}

Trajectory integrate(const DynSystem& system, const Eigen::Vector3d& x0, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("integrate: horizon must be positive");
    const double steps_real = tau / system.dt;
    const long steps = std::lround(steps_real);
    if (steps < 1 || std::abs(steps_real - static_cast<double>(steps)) > 1e-9)
        throw std::invalid_argument("integrate: dt must divide the horizon");

    Trajectory traj;
    traj.dt = system.dt;
    traj.states.reserve(static_cast<size_t>(steps) + 1);
    traj.states.push_back(x0);
    Eigen::Vector3d s = x0;
    const double h = system.dt;
    for (long i = 0; i < steps; ++i) {
        const Eigen::Vector3d k1 = system.rhs(s);
        const Eigen::Vector3d k2 = system.rhs(s + 0.5 * h * k1);
        const Eigen::Vector3d k3 = system.rhs(s + 0.5 * h * k2);
        const Eigen::Vector3d k4 = system.rhs(s + h * k3);
        s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!s.allFinite())
            throw IntegrationError("integrate: state became non-finite",
                                   static_cast<double>(i + 1) * h);
        traj.states.push_back(s);
    }
    return traj;
}

double danger(const DynSystem& system, const Eigen::Vector3d& x0, double tau) {
    const Trajectory traj = integrate(system, x0, tau);
    double zmax = -std::numeric_limits<double>::infinity();
    for (const auto& s : traj.states) zmax = std::max(zmax, s[2]);
    return zmax;
}

PcaSubspace pca_top2(const std::vector<Eigen::Vector3d>& samples) {
    if (samples.size() < 3) throw std::invalid_argument("pca_top2: need at least 3 samples");
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& s : samples) mean += s;
    mean /= static_cast<double>(samples.size());

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& s : samples) {
        const Eigen::Vector3d c = s - mean;
        cov += c * c.transpose();
    }
    cov /= static_cast<double>(samples.size());

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);  // eigenvalues ascending
    if (es.info() != Eigen::Success) throw Error("pca_top2: eigendecomposition failed");
    if (!(es.eigenvalues()[1] > 0.0))
        throw Error("pca_top2: covariance is degenerate in the top-2 subspace");

    PcaSubspace sub;
    sub.mean = mean;
    sub.eigenvalues << es.eigenvalues()[2], es.eigenvalues()[1];
    sub.components.row(0) = es.eigenvectors().col(2).transpose();
    sub.components.row(1) = es.eigenvectors().col(1).transpose();
    return sub;
}

PcaSubspace build_subspace(const DynSystem& system, double burn_in, double sample_T,
                           double stride) {
    if (!(sample_T > burn_in))
        throw std::invalid_argument("build_subspace: sampling window must exceed burn-in");
    const long every = std::lround(stride / system.dt);
    if (every < 1 || std::abs(stride - static_cast<double>(every) * system.dt) > 1e-9)
        throw std::invalid_argument("build_subspace: dt must divide the stride");

    // a generic seed just off the invariant plane reaches the attractor
    const Eigen::Vector3d seed(0.1, 0.0, 0.01);
    const Trajectory traj = integrate(system, seed, burn_in + sample_T);
    const long skip = std::lround(burn_in / system.dt);

    std::vector<Eigen::Vector3d> samples;
    for (size_t i = static_cast<size_t>(skip); i < traj.states.size();
         i += static_cast<size_t>(every))
        samples.push_back(traj.states[i]);

    PcaSubspace sub = pca_top2(samples);
    for (int i = 0; i < 2; ++i)
        if (std::abs(sub.components(i, 2)) > 0.3)
            throw Error("build_subspace: background subspace not aligned with the (x, y) plane");
    return sub;
}

PrecursorProblem precursor_objective(const PcaSubspace& subspace, const DynSystem& system,
                                     double tau) {
    const Eigen::Vector2d half = 4.0 * subspace.eigenvalues.cwiseSqrt();
    const Domain domain(-half, half);
    PrecursorProblem problem;
    problem.domain = domain;
    problem.prior = InputPrior::gaussian_diagonal(domain, subspace.eigenvalues);
    problem.objective = [subspace, system, tau](const Eigen::VectorXd& a) {
        const Eigen::Vector3d x0 = subspace.mean + subspace.components.transpose() * a;
        return -danger(system, x0, tau);
    };
    return problem;
}

}  // namespace owbo
