#include "owbo/bo.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "owbo/acquisition.hpp"
#include "owbo/density.hpp"
#include "owbo/gp.hpp"
#include "owbo/optim.hpp"

namespace owbo {

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::VectorXd best_observed_input(const Dataset& data) {
    Eigen::Index best;
    data.outputs().minCoeff(&best);
    return data.inputs().row(best).transpose();
}

Eigen::VectorXd recommend(const GpModel& model, Rng& rng) {
    const ObjectiveGrad mean_obj = [&model](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = model.posterior_mean_grad(x);
        return model.posterior_mean(x);
    };
    const std::vector<Eigen::VectorXd> extra = {best_observed_input(model.data())};
    return minimize_bounded(mean_obj, model.dim(), 20 * model.dim(), rng, extra).x;
}

}  // namespace

MetricSeqs metrics(const History& history, const Truth* truth) {
    const int K = static_cast<int>(history.recommendations.size());
    const double y_true = truth ? truth->min_value : 0.0;
    const bool have_minimizers = truth && !truth->minimizers_unit.empty();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    MetricSeqs m;
    m.simple_regret.resize(K);
    m.distance.resize(K);
    m.observation_regret.resize(K);

    double r = std::numeric_limits<double>::infinity();
    double dist = std::numeric_limits<double>::infinity();
    double ro = std::numeric_limits<double>::infinity();
    for (int i = 0; i < history.n_init; ++i) ro = std::min(ro, history.observed[i]);

    for (int k = 0; k < K; ++k) {
        r = std::min(r, history.recommendation_values[k] - y_true);
        m.simple_regret[k] = r;
        if (have_minimizers) {
            double nearest = std::numeric_limits<double>::infinity();
            for (const auto& xm : truth->minimizers_unit)
                nearest = std::min(nearest,
                                   (history.recommendations[k] - xm).squaredNorm());
            dist = std::min(dist, nearest);
            m.distance[k] = dist;
        } else {
            m.distance[k] = nan;
        }
        if (k > 0) ro = std::min(ro, history.observed[history.n_init + k - 1]);
        m.observation_regret[k] = ro;
    }
    return m;
}

RegretTrace run(const ExperimentConfig& config,
                const std::function<double(const Eigen::VectorXd&)>& objective,
                const Truth* truth) {
    config.validate();
    const int d = config.dim;

    Rng root(config.seed);
    Rng rng_init = root.substream(0);
    Rng rng_noise = root.substream(1);
    Rng rng_kde = root.substream(2);
    Rng rng_gmm = root.substream(3);
    Rng rng_ms = root.substream(4);  // model fits, acquisition starts, recommendations

    const UnitPrior uprior(config.prior, config.domain);
    const auto t0 = std::chrono::steady_clock::now();

    RegretTrace trace;
    History hist;
    hist.n_init = config.n_init;

    Dataset data(Domain::unit_cube(d));
    const Eigen::MatrixXd x_init = lhs(config.n_init, d, rng_init);
    Eigen::VectorXd f_init(config.n_init);
    for (int i = 0; i < config.n_init; ++i) f_init[i] = objective(x_init.row(i).transpose());
    const double var0 = (f_init.array() - f_init.mean()).square().mean();
    const double sd = std::sqrt(config.noise_variance * (var0 > 0.0 ? var0 : 1.0));
    for (int i = 0; i < config.n_init; ++i) {
        const double y = sd > 0.0 ? f_init[i] + sd * rng_noise.normal() : f_init[i];
        data.append(x_init.row(i).transpose(), y);
        hist.observed.push_back(y);
    }

    const auto push_record = [&](int n, const GpModel& model) {
        Eigen::VectorXd xrec = recommend(model, rng_ms);
        hist.recommendations.push_back(xrec);
        hist.recommendation_values.push_back(objective(xrec));
        const MetricSeqs m = metrics(hist, truth);
        IterRecord rec;
        rec.iter = n;
        rec.recommendation = std::move(xrec);
        rec.simple_regret = m.simple_regret[n];
        rec.distance = m.distance[n];
        rec.observation_regret = m.observation_regret[n];
        rec.wall_seconds = elapsed_seconds(t0);
        trace.records.push_back(std::move(rec));
    };

    try {
        GpModel model = GpModel::fit(data, rng_ms);
        push_record(0, model);

        for (int n = 1; n <= config.n_iter; ++n) {
            // density pipeline for weighted rules; a degenerate density
            // (flat posterior mean, collapsed mixture) falls back to the
            // unweighted counterpart for this iteration
            AcquisitionSpec active = config.acquisition;
            std::optional<GaussianMixture> mixture;
            if (active.weighted()) {
                try {
                    const Eigen::VectorXd mu =
                        sample_mu(model, uprior, config.n_samples_kde, rng_kde);
                    const LikelihoodRatio w =
                        likelihood_ratio(model, uprior, kde_1d(mu));
                    mixture = fit_gmm([&w](const Eigen::VectorXd& x) { return w(x); },
                                      uprior, config.n_gmm, config.n_fit_samples, rng_gmm);
                } catch (const DegenerateDensity&) {
                    active = active.unweighted();
                    mixture.reset();
                }
            }
            const Acquisition acq(active, model, mixture ? &*mixture : nullptr);
            const std::vector<Eigen::VectorXd> extra = {best_observed_input(data)};
            const Eigen::VectorXd x_new =
                minimize_bounded(acq.as_min_objective(), d, 10 * d, rng_ms, extra).x;

            const double f_new = objective(x_new);
            const double y_new = sd > 0.0 ? f_new + sd * rng_noise.normal() : f_new;
            data.append(x_new, y_new);
            hist.observed.push_back(y_new);

            model = GpModel::fit(data, rng_ms);
            push_record(n, model);
        }
    } catch (const Error& e) {
        trace.failed = true;
        trace.failure_message = e.what();
    }
    return trace;
}

}  // namespace owbo
