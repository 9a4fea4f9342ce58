#include "testutil.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace testutil {

Eigen::VectorXd fd_gradient(const ScalarFn& f, const Eigen::VectorXd& x, double h) {
    Eigen::VectorXd g(x.size());
    for (int j = 0; j < x.size(); ++j) {
        Eigen::VectorXd xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        g[j] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

double relative_error(double got, double want) {
    return std::abs(got - want) / std::max(1e-12, std::abs(want));
}

double gradient_relative_error(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
    const double scale = std::max(1e-8, want.cwiseAbs().maxCoeff());
    return (got - want).cwiseAbs().maxCoeff() / scale;
}

void gauss_legendre_unit(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n with the Chebyshev-based initial guess
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = 0.5 * (x + 1.0);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);  // includes the [0,1] rescale
    }
}

double integrate_unit_cube(const ScalarFn& f, int d, int n_1d) {
    Eigen::VectorXd nodes, weights;
    gauss_legendre_unit(n_1d, nodes, weights);
    if (d == 1) {
        double acc = 0.0;
        Eigen::VectorXd x(1);
        for (int i = 0; i < n_1d; ++i) {
            x[0] = nodes[i];
            acc += weights[i] * f(x);
        }
        return acc;
    }
    if (d == 2) {
        double acc = 0.0;
        Eigen::VectorXd x(2);
        for (int i = 0; i < n_1d; ++i)
            for (int j = 0; j < n_1d; ++j) {
                x[0] = nodes[i];
                x[1] = nodes[j];
                acc += weights[i] * weights[j] * f(x);
            }
        return acc;
    }
    throw std::invalid_argument("integrate_unit_cube: d must be 1 or 2");
}

McEstimate mc_average(const ScalarFn& f, const Eigen::MatrixXd& samples) {
    const int n = static_cast<int>(samples.rows());
    Eigen::VectorXd vals(n);
    for (int i = 0; i < n; ++i) vals[i] = f(samples.row(i).transpose());
    McEstimate est;
    est.mean = vals.mean();
    est.se = std::sqrt((vals.array() - est.mean).square().sum() / (n - 1.0)) / std::sqrt(n);
    return est;
}

owbo::GpModel random_model(int d, int n, double noise_variance, owbo::Rng& rng) {
    owbo::Dataset data(owbo::Domain::unit_cube(d));
    const Eigen::VectorXd freq = 2.0 + 3.0 * rng.uniform_vector(d).array();
    const Eigen::VectorXd phase = rng.uniform_vector(d);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd x = rng.uniform_vector(d);
        const double y =
            std::sin(freq.dot(x) + 2.0 * M_PI * phase[0]) + 0.1 * rng.normal();
        data.append(x, y);
    }
    Eigen::VectorXd theta(d);
    for (int j = 0; j < d; ++j) {
        const double ell = rng.uniform(0.2, 0.8);
        theta[j] = ell * ell;
    }
    const owbo::GpHyperparams hp{rng.uniform(-0.2, 0.2),
                                 owbo::RbfArd(rng.uniform(0.5, 2.0), theta),
                                 noise_variance};
    return owbo::GpModel(data, hp);
}

owbo::GaussianMixture random_mixture(int d, int k, owbo::Rng& rng) {
    Eigen::VectorXd weights(k);
    for (int i = 0; i < k; ++i) weights[i] = rng.uniform(0.2, 1.0);
    weights /= weights.sum();

    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covs;
    for (int i = 0; i < k; ++i) {
        means.push_back((0.2 + 0.6 * rng.uniform_vector(d).array()).matrix());
        Eigen::MatrixXd a(d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) a(r, c) = rng.normal();
        const double s = rng.uniform(0.05, 0.25);
        covs.push_back(s * s * (Eigen::MatrixXd::Identity(d, d) + 0.3 * a * a.transpose()));
    }
    return owbo::GaussianMixture(weights, means, covs, rng.uniform(0.5, 2.0));
}

}  // namespace testutil
