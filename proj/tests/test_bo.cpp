#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "owbo/benchfns.hpp"
#include "owbo/bo.hpp"
#include "testutil.hpp"

using owbo::AcqKind;
using owbo::Domain;
using owbo::ExperimentConfig;
using owbo::History;
using owbo::InputPrior;
using owbo::MetricSeqs;
using owbo::RegretTrace;
using owbo::Truth;

namespace {

ExperimentConfig base_config(int d, AcqKind kind, int n_init, int n_iter,
                             std::uint64_t seed) {
    ExperimentConfig c;
    c.objective = "custom";
    c.dim = d;
    c.domain = Domain::unit_cube(d);
    c.prior = InputPrior::uniform(Domain::unit_cube(d));
    c.n_init = n_init;
    c.n_iter = n_iter;
    c.acquisition = {kind, 0.01, 1.0};
    c.noise_variance = 0.0;
    c.n_samples_kde = 20000;
    c.n_fit_samples = 3000;
    c.seed = seed;
    return c;
}

double quadratic(const Eigen::VectorXd& x) {
    return (x.array() - 0.5).square().sum();
}

void check_monotone(const Eigen::VectorXd& series) {
    for (int i = 1; i < series.size(); ++i) CHECK(series[i] <= series[i - 1]);
}

}  // namespace

TEST_SUITE("bo") {

TEST_CASE("metric series are running minima") {
    History h;
    h.n_init = 1;
    for (double v : {3.0, 1.0, 2.0}) {
        h.recommendations.push_back(Eigen::Vector2d(0.5, 0.5));
        h.recommendation_values.push_back(v);
    }
    h.observed = {0.5, -0.2, 0.1};

    const MetricSeqs m = owbo::metrics(h, nullptr);
    REQUIRE(m.simple_regret.size() == 3);
    CHECK(m.simple_regret[0] == doctest::Approx(3.0));
    CHECK(m.simple_regret[1] == doctest::Approx(1.0));
    CHECK(m.simple_regret[2] == doctest::Approx(1.0));
    CHECK(m.observation_regret[0] == doctest::Approx(0.5));
    CHECK(m.observation_regret[1] == doctest::Approx(-0.2));
    CHECK(m.observation_regret[2] == doctest::Approx(-0.2));
    for (int i = 0; i < 3; ++i) CHECK(std::isnan(m.distance[i]));
}

TEST_CASE("distance tracks the nearest reference minimizer per step") {
    Truth truth;
    truth.minimizers_unit = {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 1.0)};
    truth.min_value = 2.0;

    History h;
    h.n_init = 2;
    h.recommendations = {Eigen::Vector2d(0.25, 0.0), Eigen::Vector2d(0.9, 1.0)};
    h.recommendation_values = {5.0, 7.0};
    h.observed = {1.0, 2.0, 0.0};

    const MetricSeqs m = owbo::metrics(h, &truth);
    CHECK(m.distance[0] == doctest::Approx(0.0625).epsilon(1e-12));
    CHECK(m.distance[1] == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(m.simple_regret[0] == doctest::Approx(3.0));
    CHECK(m.simple_regret[1] == doctest::Approx(3.0));
    CHECK(m.observation_regret[0] == doctest::Approx(1.0));
    CHECK(m.observation_regret[1] == doctest::Approx(0.0));
}

TEST_CASE("a zero-iteration run records exactly the initial state") {
    const ExperimentConfig c = base_config(2, AcqKind::ei, 4, 0, 3);
    Truth truth;
    truth.minimizers_unit = {Eigen::Vector2d(0.5, 0.5)};
    truth.min_value = 0.0;
    const RegretTrace trace = owbo::run(c, quadratic, &truth);

    CHECK_FALSE(trace.failed);
    REQUIRE(trace.records.size() == 1);
    const auto& r = trace.records[0];
    CHECK(r.iter == 0);
    REQUIRE(r.recommendation.size() == 2);
    for (int j = 0; j < 2; ++j) {
        CHECK(r.recommendation[j] >= 0.0);
        CHECK(r.recommendation[j] <= 1.0);
    }
    CHECK(r.simple_regret == doctest::Approx(quadratic(r.recommendation)).epsilon(1e-12));
    CHECK(r.distance ==
          doctest::Approx((r.recommendation.array() - 0.5).square().sum()).epsilon(1e-12));
    CHECK(std::isfinite(r.observation_regret));
    CHECK(r.wall_seconds >= 0.0);
}

TEST_CASE("the loop locates an easy quadratic minimum on most seeds") {
    Truth truth;
    truth.minimizers_unit = {Eigen::Vector2d(0.5, 0.5)};
    truth.min_value = 0.0;

    int hits = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ExperimentConfig c = base_config(2, AcqKind::ei, 3, 15, 100 + seed);
        const RegretTrace trace = owbo::run(c, quadratic, &truth);
        REQUIRE_FALSE(trace.failed);
        REQUIRE(trace.records.size() == 16);
        Eigen::VectorXd r(16), dist(16), ro(16);
        for (int i = 0; i < 16; ++i) {
            CHECK(trace.records[i].iter == i);
            r[i] = trace.records[i].simple_regret;
            dist[i] = trace.records[i].distance;
            ro[i] = trace.records[i].observation_regret;
            if (i > 0)
                CHECK(trace.records[i].wall_seconds >=
                      trace.records[i - 1].wall_seconds);
        }
        check_monotone(r);
        check_monotone(dist);
        check_monotone(ro);
        if (r[15] <= 1e-2) ++hits;
    }
    CHECK(hits >= 18);
}

TEST_CASE("identical configurations reproduce identical traces") {
    const ExperimentConfig c = base_config(2, AcqKind::ei, 3, 4, 7);
    Truth truth;
    truth.minimizers_unit = {Eigen::Vector2d(0.5, 0.5)};
    truth.min_value = 0.0;
    const RegretTrace a = owbo::run(c, quadratic, &truth);
    const RegretTrace b = owbo::run(c, quadratic, &truth);

    REQUIRE_FALSE(a.failed);
    REQUIRE(a.records.size() == b.records.size());
    for (size_t i = 0; i < a.records.size(); ++i) {
        CHECK((a.records[i].recommendation - b.records[i].recommendation)
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
        CHECK(a.records[i].simple_regret == b.records[i].simple_regret);
        CHECK(a.records[i].distance == b.records[i].distance);
        CHECK(a.records[i].observation_regret == b.records[i].observation_regret);
    }

    // a different seed explores differently
    ExperimentConfig c2 = c;
    c2.seed = 8;
    const RegretTrace d = owbo::run(c2, quadratic, &truth);
    bool any_diff = false;
    for (size_t i = 0; i < a.records.size(); ++i)
        if ((a.records[i].recommendation - d.records[i].recommendation).norm() > 0.0)
            any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("the weighted pipeline runs end to end with noise") {
    const owbo::Benchmark bench = owbo::make_benchmark("ackley", 2);
    const auto objective = owbo::unit_objective(bench);
    const owbo::BenchmarkTruth bt = owbo::benchmark_truth_unit(bench);
    Truth truth{bt.minimizers_unit, bt.min_value};

    ExperimentConfig c = base_config(2, AcqKind::lcb_lw, 3, 4, 21);
    c.objective = "ackley";
    c.noise_variance = 1e-3;
    const RegretTrace trace = owbo::run(c, objective, &truth);

    REQUIRE_FALSE(trace.failed);
    REQUIRE(trace.records.size() == 5);
    Eigen::VectorXd r(5), dist(5), ro(5);
    for (int i = 0; i < 5; ++i) {
        r[i] = trace.records[i].simple_regret;
        dist[i] = trace.records[i].distance;
        ro[i] = trace.records[i].observation_regret;
        CHECK(std::isfinite(r[i]));
        CHECK(std::isfinite(dist[i]));
        CHECK(std::isfinite(ro[i]));
        CHECK(r[i] >= 0.0);
        CHECK(dist[i] >= 0.0);
    }
    check_monotone(r);
    check_monotone(dist);
    check_monotone(ro);
}

TEST_CASE("an objective failure yields a marked partial trace") {
    int calls = 0;
    auto flaky = [&calls](const Eigen::VectorXd& x) -> double {
        if (++calls >= 12) throw owbo::Error("boom: sensor dropout");
        return quadratic(x);
    };
    const ExperimentConfig c = base_config(2, AcqKind::ei, 4, 5, 9);
    const RegretTrace trace = owbo::run(c, flaky);

    CHECK(trace.failed);
    CHECK(trace.failure_message.find("boom") != std::string::npos);
    CHECK(trace.records.size() >= 1);
    CHECK(trace.records.size() <= 5);
    for (size_t i = 0; i < trace.records.size(); ++i)
        CHECK(trace.records[i].iter == static_cast<int>(i));
}

}  // TEST_SUITE
