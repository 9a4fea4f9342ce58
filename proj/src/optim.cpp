#include "owbo/optim.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

#include "owbo/core.hpp"

namespace owbo {

Eigen::MatrixXd lhs(int n, int d, Rng& rng) {
    if (n < 1 || d < 1) throw std::invalid_argument("lhs: n and d must be positive");
    Eigen::MatrixXd pts(n, d);
    for (int j = 0; j < d; ++j) {
        const std::vector<int> perm = rng.permutation(n);
        for (int i = 0; i < n; ++i)
            pts(i, j) = (static_cast<double>(perm[i]) + rng.uniform()) / n;
    }
    return pts;
}

namespace {

Eigen::VectorXd clamp_box(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                          const Eigen::VectorXd& hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

struct Pair {
    Eigen::VectorXd s, y;
    double rho;
};

// standard two-loop recursion; H0 scaled by the latest curvature pair
Eigen::VectorXd lbfgs_direction(const std::deque<Pair>& mem, const Eigen::VectorXd& grad) {
    Eigen::VectorXd q = grad;
    std::vector<double> a(mem.size());
    for (int i = static_cast<int>(mem.size()) - 1; i >= 0; --i) {
        a[i] = mem[i].rho * mem[i].s.dot(q);
        q -= a[i] * mem[i].y;
    }
    if (!mem.empty()) {
        const Pair& last = mem.back();
        q *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (size_t i = 0; i < mem.size(); ++i) {
        const double b = mem[i].rho * mem[i].y.dot(q);
        q += (a[i] - b) * mem[i].s;
    }
    return -q;
}

}  // namespace

MinimizeResult lbfgs_box(const ObjectiveGrad& f, const Eigen::VectorXd& lower,
                         const Eigen::VectorXd& upper, const Eigen::VectorXd& x0,
                         const MinimizeOptions& opts) {
    const int d = static_cast<int>(x0.size());
    MinimizeResult res;
    res.x = clamp_box(x0, lower, upper);

    Eigen::VectorXd g(d);
    double fx = f(res.x, g);
    if (!std::isfinite(fx)) {
        res.f = fx;
        return res;  // valid == false
    }
    res.valid = true;

    std::deque<Pair> mem;
    for (int iter = 0; iter < opts.max_iters; ++iter) {
        const Eigen::VectorXd pg = res.x - clamp_box(res.x - g, lower, upper);
        if (pg.lpNorm<Eigen::Infinity>() <= opts.grad_tol) {
            res.converged = true;
            break;
        }

        Eigen::VectorXd p = mem.empty() ? Eigen::VectorXd(-g) : lbfgs_direction(mem, g);
        if (!p.allFinite() || p.dot(g) > -1e-14 * p.norm() * g.norm()) {
            mem.clear();
            p = -g;
        }

        // Armijo backtracking on the projected path
        double t = 1.0;
        bool accepted = false;
        Eigen::VectorXd xt, gt(d);
        double ft = fx;
        for (int ls = 0; ls < 50; ++ls) {
            xt = clamp_box(res.x + t * p, lower, upper);
            const Eigen::VectorXd step = xt - res.x;
            if (step.lpNorm<Eigen::Infinity>() < 1e-16) break;
            ft = f(xt, gt);
            if (std::isfinite(ft) && ft <= fx + 1e-4 * g.dot(step)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (mem.empty()) break;  // stationary within line-search resolution
            mem.clear();             // retry from steepest descent
            continue;
        }

        const Eigen::VectorXd s = xt - res.x;
        const Eigen::VectorXd y = gt - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            mem.push_back({s, y, 1.0 / sy});
            if (static_cast<int>(mem.size()) > opts.memory) mem.pop_front();
        }
        res.x = xt;
        fx = ft;
        g = gt;
    }
    res.f = fx;
    return res;
}

MinimizeResult minimize_bounded(const ObjectiveGrad& f, int dim, int n_restarts, Rng& rng,
                                const std::vector<Eigen::VectorXd>& extra_starts,
                                const MinimizeOptions& opts) {
    if (n_restarts < 1) throw std::invalid_argument("minimize_bounded: n_restarts must be >= 1");
    const Eigen::VectorXd lo = Eigen::VectorXd::Zero(dim);
    const Eigen::VectorXd hi = Eigen::VectorXd::Ones(dim);
    const Eigen::MatrixXd starts = lhs(n_restarts, dim, rng);

    MinimizeResult best;
    auto consider = [&](const Eigen::VectorXd& x0) {
        MinimizeResult r = lbfgs_box(f, lo, hi, x0, opts);
        if (r.valid && (!best.valid || r.f < best.f)) best = r;
    };
    for (int i = 0; i < n_restarts; ++i) consider(starts.row(i).transpose());
    for (const auto& x0 : extra_starts) consider(x0);

    if (!best.valid) throw Error("minimize_bounded: objective non-finite at every start");
    return best;
}

}  // namespace owbo
