#include <Eigen/Dense>
#include <stdexcept>

#include "doctest.h"
#include "owbo/core.hpp"
#include "owbo/rng.hpp"

using owbo::Dataset;
using owbo::Domain;
using owbo::ExperimentConfig;
using owbo::InputPrior;
using owbo::Rng;
using owbo::UnitPrior;

namespace {

Domain box2(double lo, double hi) {
    return Domain(Eigen::Vector2d(lo, lo), Eigen::Vector2d(hi, hi));
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("domain validates bounds and reports geometry") {
    CHECK_THROWS_AS(Domain(Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(Domain(Eigen::VectorXd(), Eigen::VectorXd()), std::invalid_argument);
    CHECK_THROWS_AS(Domain(Eigen::Vector2d(0, 0), Eigen::VectorXd::Ones(3)),
                    std::invalid_argument);

    const Domain d = box2(-5.0, 5.0);
    CHECK(d.dim() == 2);
    CHECK(d.volume() == doctest::Approx(100.0));
    CHECK(d.contains(Eigen::Vector2d(0, 0)));
    CHECK(d.contains(Eigen::Vector2d(-5, 5)));
    CHECK_FALSE(d.contains(Eigen::Vector2d(-5.1, 0)));

    const Domain u = Domain::unit_cube(3);
    CHECK(u.dim() == 3);
    CHECK(u.volume() == doctest::Approx(1.0));
}

TEST_CASE("rescale maps midpoint and corners, round-trips within 1e-14") {
    const Domain d = box2(-5.0, 5.0);
    const Eigen::VectorXd mid = owbo::rescale_to_unit(d, Eigen::Vector2d(0, 0));
    CHECK(mid[0] == doctest::Approx(0.5));
    CHECK(mid[1] == doctest::Approx(0.5));

    const Eigen::VectorXd corner = owbo::rescale_to_unit(d, Eigen::Vector2d(-5, 5));
    CHECK(corner[0] == doctest::Approx(0.0));
    CHECK(corner[1] == doctest::Approx(1.0));

    CHECK_THROWS_AS(owbo::rescale_to_unit(d, Eigen::Vector2d(6, 0)), std::invalid_argument);

    Rng rng(101);
    double worst = 0.0;
    const Domain skew(Eigen::Vector2d(-3.0, 0.25), Eigen::Vector2d(7.5, 0.75));
    for (int i = 0; i < 100; ++i) {
        Eigen::VectorXd x(2);
        x[0] = rng.uniform(-3.0, 7.5);
        x[1] = rng.uniform(0.25, 0.75);
        const Eigen::VectorXd back = owbo::unrescale(skew, owbo::rescale_to_unit(skew, x));
        worst = std::max(worst, (back - x).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-14);
}

TEST_CASE("dataset keeps rows aligned and rejects out-of-domain points") {
    Dataset data(box2(0.0, 1.0));
    CHECK(data.size() == 0);
    data.append(Eigen::Vector2d(0.25, 0.5), 1.5);
    data.append(Eigen::Vector2d(1.0, 1.0), -2.0);
    CHECK(data.size() == 2);
    CHECK(data.inputs().rows() == 2);
    CHECK(data.outputs().size() == 2);
    CHECK(data.outputs()[1] == doctest::Approx(-2.0));

    CHECK_THROWS_AS(data.append(Eigen::Vector2d(1.5, 0.0), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(data.append(Eigen::Vector3d(0.1, 0.1, 0.1), 0.0), std::invalid_argument);
    CHECK(data.size() == 2);
}

TEST_CASE("uniform prior density is 1/volume inside, 0 outside") {
    const Domain d = box2(-5.0, 5.0);
    const InputPrior prior = InputPrior::uniform(d);
    CHECK(prior.density(Eigen::Vector2d(0, 0)) == doctest::Approx(0.01));
    CHECK(prior.density(Eigen::Vector2d(6, 0)) == 0.0);
    CHECK(prior.sampling_density(Eigen::Vector2d(1, 1)) == doctest::Approx(0.01));
}

TEST_CASE("gaussian prior validates variances and uses the plain normal pdf") {
    const Domain d = box2(-2.0, 2.0);
    CHECK_THROWS_AS(InputPrior::gaussian_diagonal(d, Eigen::Vector2d(0.5, -1.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(InputPrior::gaussian_diagonal(d, Eigen::VectorXd::Ones(3)),
                    std::invalid_argument);

    const InputPrior prior = InputPrior::gaussian_diagonal(d, Eigen::Vector2d(0.25, 1.0));
    // product of independent normal pdfs at the mode
    const double want = (1.0 / std::sqrt(2.0 * M_PI * 0.25)) * (1.0 / std::sqrt(2.0 * M_PI));
    CHECK(prior.density(Eigen::Vector2d(0, 0)) == doctest::Approx(want));
    // truncation renormalization enters sampling_density only
    CHECK(prior.sampling_density(Eigen::Vector2d(0, 0)) >= prior.density(Eigen::Vector2d(0, 0)));
}

TEST_CASE("prior densities integrate to 1 by Monte Carlo") {
    Rng rng(202);
    const int n = 1000000;

    // uniform over its own domain
    const Domain d = box2(-1.0, 3.0);
    const InputPrior uni = InputPrior::uniform(d);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd x(2);
        x[0] = rng.uniform(-1.0, 3.0);
        x[1] = rng.uniform(-1.0, 3.0);
        acc += uni.density(x);
    }
    CHECK(acc / n * d.volume() == doctest::Approx(1.0).epsilon(0.01));

    // gaussian over +-8 standard deviations
    const Eigen::Vector2d variances(0.3, 0.5);
    const InputPrior gauss = InputPrior::gaussian_diagonal(box2(-20.0, 20.0), variances);
    const double half = 8.0 * std::sqrt(0.5);
    acc = 0.0;
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd x(2);
        x[0] = rng.uniform(-half, half);
        x[1] = rng.uniform(-half, half);
        acc += gauss.density(x);
    }
    CHECK(acc / n * (2 * half) * (2 * half) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("prior samples stay inside the domain") {
    Rng rng(77);
    const Domain d = box2(-0.5, 0.5);
    const InputPrior gauss = InputPrior::gaussian_diagonal(d, Eigen::Vector2d(1.0, 1.0));
    for (int i = 0; i < 500; ++i) CHECK(d.contains(gauss.sample(rng)));
    const InputPrior uni = InputPrior::uniform(d);
    for (int i = 0; i < 500; ++i) CHECK(d.contains(uni.sample(rng)));
}

TEST_CASE("unit prior of a uniform prior has density 1 on the cube") {
    const Domain d = box2(-5.0, 15.0);
    const UnitPrior up(InputPrior::uniform(d), d);
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        const Eigen::VectorXd u = rng.uniform_vector(2);
        CHECK(up.density(u) == doctest::Approx(1.0));
        CHECK(up.sampling_density(u) == doctest::Approx(1.0));
    }
}

TEST_CASE("unit prior pushforward carries the affine jacobian") {
    const Domain d(Eigen::Vector2d(-2.0, -1.0), Eigen::Vector2d(2.0, 3.0));
    const InputPrior prior = InputPrior::gaussian_diagonal(d, Eigen::Vector2d(0.5, 2.0));
    const UnitPrior up(prior, d);
    Rng rng(6);
    const double volume = d.volume();
    for (int i = 0; i < 50; ++i) {
        const Eigen::VectorXd u = rng.uniform_vector(2);
        const Eigen::VectorXd x = owbo::unrescale(d, u);
        CHECK(up.density(u) == doctest::Approx(prior.density(x) * volume).epsilon(1e-10));
    }

    // sampling_density integrates to 1 on the unit cube
    double acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) acc += up.sampling_density(rng.uniform_vector(2));
    CHECK(acc / n == doctest::Approx(1.0).epsilon(0.01));

    // unit-prior samples match the pushforward of domain samples
    for (int i = 0; i < 200; ++i) {
        const Eigen::VectorXd u = up.sample(rng);
        CHECK(u.minCoeff() >= 0.0);
        CHECK(u.maxCoeff() <= 1.0);
    }
}

TEST_CASE("experiment config validation") {
    ExperimentConfig cfg;
    CHECK_NOTHROW(cfg.validate());

    ExperimentConfig bad = cfg;
    bad.n_init = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.n_iter = -1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.noise_variance = -0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.n_gmm = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.n_samples_kde = 10;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.domain = Domain::unit_cube(3);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

}  // TEST_SUITE
