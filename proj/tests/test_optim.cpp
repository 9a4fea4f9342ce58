#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "owbo/core.hpp"
#include "owbo/optim.hpp"
#include "testutil.hpp"

using owbo::lbfgs_box;
using owbo::lhs;
using owbo::minimize_bounded;
using owbo::MinimizeResult;
using owbo::ObjectiveGrad;
using owbo::Rng;

namespace {

// analytic value-and-gradient wrappers used across cases
ObjectiveGrad quadratic_at(double c) {
    return [c](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        const Eigen::VectorXd r = x.array() - c;
        g = 2.0 * r;
        return r.squaredNorm();
    };
}

double ackley_unit(const Eigen::VectorXd& u) {
    const int d = static_cast<int>(u.size());
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < d; ++i) {
        const double x = -32.768 + 65.536 * u[i];
        s1 += x * x;
        s2 += std::cos(2.0 * M_PI * x);
    }
    return -20.0 * std::exp(-0.2 * std::sqrt(s1 / d)) - std::exp(s2 / d) + 20.0 + M_E;
}

ObjectiveGrad fd_objective(const testutil::ScalarFn& f) {
    return [f](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = testutil::fd_gradient(f, x, 1e-7);
        return f(x);
    };
}

}  // namespace

TEST_SUITE("optim") {

TEST_CASE("lhs places one point per stratum in every dimension") {
    Rng rng(11);
    const Eigen::MatrixXd small = lhs(4, 1, rng);
    std::vector<double> pts(small.col(0).data(), small.col(0).data() + 4);
    std::sort(pts.begin(), pts.end());
    for (int i = 0; i < 4; ++i) {
        CHECK(pts[i] >= i / 4.0);
        CHECK(pts[i] < (i + 1) / 4.0);
    }

    const int n = 100;
    const Eigen::MatrixXd big = lhs(n, 2, rng);
    for (int j = 0; j < 2; ++j) {
        std::vector<int> counts(n, 0);
        for (int i = 0; i < n; ++i) {
            const double v = big(i, j);
            REQUIRE(v >= 0.0);
            REQUIRE(v < 1.0);
            ++counts[static_cast<int>(v * n)];
        }
        for (int c : counts) CHECK(c == 1);
    }
}

TEST_CASE("lhs is deterministic per stream") {
    Rng a(42), b(42);
    const Eigen::MatrixXd da = lhs(17, 3, a);
    const Eigen::MatrixXd db = lhs(17, 3, b);
    CHECK((da - db).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("projected descent never leaves the box and never ends above its start") {
    Rng rng(7);
    const Eigen::VectorXd lo = Eigen::VectorXd::Zero(3);
    const Eigen::VectorXd hi = Eigen::VectorXd::Ones(3);
    const ObjectiveGrad f = fd_objective(ackley_unit);
    for (int i = 0; i < 25; ++i) {
        const Eigen::VectorXd x0 = rng.uniform_vector(3);
        Eigen::VectorXd g(3);
        const double f0 = f(x0, g);
        const MinimizeResult r = lbfgs_box(f, lo, hi, x0);
        REQUIRE(r.valid);
        CHECK(r.f <= f0);
        CHECK(r.x.minCoeff() >= 0.0);
        CHECK(r.x.maxCoeff() <= 1.0);
    }
}

TEST_CASE("non-finite start is reported invalid") {
    const ObjectiveGrad bad = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = Eigen::VectorXd::Zero(x.size());
        return std::numeric_limits<double>::quiet_NaN();
    };
    const MinimizeResult r = lbfgs_box(bad, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2),
                                       Eigen::VectorXd::Constant(2, 0.5));
    CHECK_FALSE(r.valid);
}

TEST_CASE("multistart solves a convex quadratic to 1e-6") {
    Rng rng(1);
    const MinimizeResult r = minimize_bounded(quadratic_at(0.3), 4, 8, rng);
    REQUIRE(r.valid);
    CHECK((r.x.array() - 0.3).abs().maxCoeff() <= 1e-6);
    CHECK(r.f <= 1e-10);
}

TEST_CASE("multistart pins a linear objective to the boundary") {
    Rng rng(2);
    const ObjectiveGrad f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = Eigen::VectorXd::Zero(x.size());
        g[0] = 1.0;
        return x[0];
    };
    const MinimizeResult r = minimize_bounded(f, 2, 6, rng);
    REQUIRE(r.valid);
    CHECK(r.x[0] <= 1e-10);
}

TEST_CASE("multistart result is never worse than any start value") {
    Rng rng(3);
    Rng replay = rng;  // same state: regenerates the start design
    const ObjectiveGrad f = fd_objective(ackley_unit);
    const int n_restarts = 20;
    const MinimizeResult r = minimize_bounded(f, 2, n_restarts, rng);
    REQUIRE(r.valid);

    const Eigen::MatrixXd starts = lhs(n_restarts, 2, replay);
    for (int i = 0; i < n_restarts; ++i) {
        CHECK(r.f <= ackley_unit(starts.row(i).transpose()) + 1e-12);
    }
    CHECK(r.x.minCoeff() >= 0.0);
    CHECK(r.x.maxCoeff() <= 1.0);
}

TEST_CASE("extra starts participate in the search") {
    Rng rng(4);
    // narrow basin around 0.9; LHS starts mostly descend into the wide one
    const ObjectiveGrad f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        const double t = x[0];
        const double wide = 0.5 * (t - 0.2) * (t - 0.2);
        const double narrow = -2.0 * std::exp(-(t - 0.9) * (t - 0.9) / 1e-4);
        g.resize(1);
        g[0] = (t - 0.2) + narrow * (-2.0 * (t - 0.9) / 1e-4);
        return wide + narrow;
    };
    Eigen::VectorXd hint(1);
    hint << 0.9;
    const MinimizeResult r = minimize_bounded(f, 1, 3, rng, {hint});
    REQUIRE(r.valid);
    CHECK(r.f <= -1.5);
    CHECK(std::abs(r.x[0] - 0.9) <= 0.02);
}

TEST_CASE("all-invalid starts raise an error") {
    Rng rng(5);
    const ObjectiveGrad bad = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = Eigen::VectorXd::Zero(x.size());
        return std::numeric_limits<double>::infinity();
    };
    CHECK_THROWS_AS(minimize_bounded(bad, 2, 4, rng), owbo::Error);
}

TEST_CASE("deterministic multistart per stream") {
    Rng a(99), b(99);
    const ObjectiveGrad f = fd_objective(ackley_unit);
    const MinimizeResult ra = minimize_bounded(f, 2, 10, a);
    const MinimizeResult rb = minimize_bounded(f, 2, 10, b);
    CHECK(ra.f == rb.f);
    CHECK((ra.x - rb.x).cwiseAbs().maxCoeff() == 0.0);
}

}  // TEST_SUITE
