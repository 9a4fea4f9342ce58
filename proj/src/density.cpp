#include "owbo/density.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Eigenvalues>

namespace owbo {

namespace {

constexpr double kFloorScale = 1e-6;        // p_min = 1e-6 * max(density)
constexpr double kCovarianceFloor = 1e-6;   // eigenvalue floor on Sigma_i

void fft(std::vector<std::complex<double>>& a, bool inverse) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

double quantile(std::vector<double> v, double q) {
    const double pos = q * (static_cast<double>(v.size()) - 1.0);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, v.size() - 1);
    std::nth_element(v.begin(), v.begin() + lo, v.end());
    const double a = v[lo];
    std::nth_element(v.begin(), v.begin() + hi, v.end());
    return a + (pos - static_cast<double>(lo)) * (v[hi] - a);
}

}  // namespace

double Kde1d::query(double y) const {
    const int m = static_cast<int>(grid.size());
    if (y < grid[0] || y > grid[m - 1]) return floor;
    const double step = (grid[m - 1] - grid[0]) / (m - 1);
    const double pos = (y - grid[0]) / step;
    const int i = std::min(static_cast<int>(pos), m - 2);
    const double frac = pos - i;
    return std::max(density[i] + frac * (density[i + 1] - density[i]), floor);
}

Eigen::VectorXd sample_mu(const GpModel& model, const UnitPrior& prior, int n_samples,
                          Rng& rng) {
    if (n_samples < 100)
        throw std::invalid_argument("sample_mu: need at least 100 samples");
    const int d = prior.dim();
    Eigen::VectorXd out(n_samples);
    constexpr int chunk = 8192;
    Eigen::MatrixXd block(chunk, d);
    for (int start = 0; start < n_samples; start += chunk) {
        const int len = std::min(chunk, n_samples - start);
        for (int i = 0; i < len; ++i) block.row(i) = prior.sample(rng).transpose();
        out.segment(start, len) = model.posterior_mean_many(block.topRows(len));
    }
    return out;
}

Kde1d kde_1d(const Eigen::VectorXd& samples, int grid_size) {
    const int n = static_cast<int>(samples.size());
    if (n < 100) throw std::invalid_argument("kde_1d: need at least 100 samples");
    if (grid_size < 8) throw std::invalid_argument("kde_1d: grid too small");

    const double mean = samples.mean();
    const double sd = std::sqrt((samples.array() - mean).square().mean());
    std::vector<double> v(samples.data(), samples.data() + n);
    const double iqr = quantile(v, 0.75) - quantile(v, 0.25);

    // Silverman with the usual guard: take the min over the *positive*
    // spread measures; no positive spread at all means a degenerate sample.
    const double scale_tol = 1e-12 * std::max(1.0, std::abs(mean));
    double spread = std::numeric_limits<double>::infinity();
    if (sd > scale_tol) spread = std::min(spread, sd);
    if (iqr > scale_tol) spread = std::min(spread, iqr / 1.34);
    if (!std::isfinite(spread))
        throw DegenerateDensity("kde_1d: samples have zero spread");
    const double h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);

    const double lo = samples.minCoeff() - 3.0 * h;
    const double hi = samples.maxCoeff() + 3.0 * h;
    const int m = grid_size;
    const double step = (hi - lo) / (m - 1);

    // linear binning
    std::vector<double> counts(m, 0.0);
    for (int s = 0; s < n; ++s) {
        const double pos = (samples[s] - lo) / step;
        const int i = std::min(static_cast<int>(pos), m - 2);
        const double frac = pos - i;
        counts[i] += 1.0 - frac;
        counts[i + 1] += frac;
    }

    // convolve with the Gaussian kernel by FFT
    const size_t P = next_pow2(2 * static_cast<size_t>(m));
    std::vector<std::complex<double>> fc(P), fk(P);
    for (int i = 0; i < m; ++i) fc[i] = counts[i];
    const double norm = 1.0 / (h * std::sqrt(2.0 * M_PI));
    for (int j = 0; j < m; ++j) {
        const double u = j * step / h;
        const double k = norm * std::exp(-0.5 * u * u);
        fk[j] += k;
        if (j > 0) fk[P - j] += k;
    }
    fft(fc, false);
    fft(fk, false);
    for (size_t i = 0; i < P; ++i) fc[i] *= fk[i];
    fft(fc, true);

    Kde1d kde;
    kde.bandwidth = h;
    kde.grid = Eigen::VectorXd::LinSpaced(m, lo, hi);
    kde.density.resize(m);
    for (int i = 0; i < m; ++i) kde.density[i] = std::max(0.0, fc[i].real() / n);
    kde.floor = kFloorScale * kde.density.maxCoeff();
    return kde;
}

LikelihoodRatio::LikelihoodRatio(const GpModel& model, const UnitPrior& prior, Kde1d kde)
    : model_(&model), prior_(&prior), kde_(std::move(kde)) {}

double LikelihoodRatio::operator()(const Eigen::VectorXd& x) const {
    return prior_->density(x) / kde_.query(model_->posterior_mean(x));
}

LikelihoodRatio likelihood_ratio(const GpModel& model, const UnitPrior& prior, Kde1d kde) {
    return LikelihoodRatio(model, prior, std::move(kde));
}

GaussianMixture::GaussianMixture(Eigen::VectorXd weights, std::vector<Eigen::VectorXd> means,
                                 std::vector<Eigen::MatrixXd> covariances, double total_mass)
    : weights_(std::move(weights)),
      means_(std::move(means)),
      covariances_(std::move(covariances)),
      total_mass_(total_mass) {
    const int k = static_cast<int>(weights_.size());
    if (k < 1 || means_.size() != static_cast<size_t>(k) ||
        covariances_.size() != static_cast<size_t>(k))
        throw std::invalid_argument("GaussianMixture: inconsistent component counts");
    if ((weights_.array() <= 0.0).any() || std::abs(weights_.sum() - 1.0) > 1e-6)
        throw std::invalid_argument("GaussianMixture: weights must be positive and sum to 1");
    if (!(total_mass_ > 0.0))
        throw std::invalid_argument("GaussianMixture: total_mass must be positive");
    weights_ /= weights_.sum();

    const int d = static_cast<int>(means_[0].size());
    llts_.reserve(k);
    log_norm_.reserve(k);
    for (int i = 0; i < k; ++i) {
        llts_.emplace_back(covariances_[i]);
        if (llts_.back().info() != Eigen::Success)
            throw std::invalid_argument("GaussianMixture: covariance not positive definite");
        log_norm_.push_back(-0.5 * d * std::log(2.0 * M_PI) -
                            llts_.back().matrixLLT().diagonal().array().log().sum());
    }
}

double GaussianMixture::component_density(int i, const Eigen::VectorXd& x) const {
    const Eigen::VectorXd diff = x - means_[i];
    const Eigen::VectorXd z = llts_[i].matrixL().solve(diff);
    return std::exp(log_norm_[i] - 0.5 * z.squaredNorm());
}

double GaussianMixture::evaluate(const Eigen::VectorXd& x) const {
    double acc = 0.0;
    for (int i = 0; i < n_components(); ++i) acc += weights_[i] * component_density(i, x);
    return total_mass_ * acc;
}

Eigen::VectorXd GaussianMixture::evaluate_grad(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim());
    for (int i = 0; i < n_components(); ++i) {
        const double dens = weights_[i] * component_density(i, x);
        g -= dens * llts_[i].solve(x - means_[i]);
    }
    return total_mass_ * g;
}

GaussianMixture GaussianMixture::with_total_mass(double mass) const {
    return GaussianMixture(weights_, means_, covariances_, mass);
}

namespace {

struct EmData {
    const Eigen::MatrixXd& X;  // n x d samples
    const Eigen::VectorXd& W;  // normalized nonnegative weights, sum 1
};

// one EM fit with k components; prunes and retries with k-1 on collapse
GaussianMixture em_fit(const EmData& data, int k, double total_mass, Rng& rng) {
    const int n = static_cast<int>(data.X.rows());
    const int d = static_cast<int>(data.X.cols());
    if (k < 1) throw DegenerateDensity("fit_gmm: all components collapsed");

    // weighted k-means++ seeding
    std::vector<Eigen::VectorXd> centers;
    auto categorical = [&](const Eigen::VectorXd& prob) {
        const double total = prob.sum();
        if (!(total > 0.0)) return -1;
        double u = rng.uniform() * total;
        for (int s = 0; s < n; ++s) {
            u -= prob[s];
            if (u <= 0.0) return s;
        }
        return n - 1;
    };
    int first = categorical(data.W);
    if (first < 0) throw DegenerateDensity("fit_gmm: weights vanish everywhere");
    centers.push_back(data.X.row(first).transpose());
    Eigen::VectorXd dist2 =
        (data.X.rowwise() - centers[0].transpose()).rowwise().squaredNorm();
    while (static_cast<int>(centers.size()) < k) {
        const int idx = categorical(data.W.cwiseProduct(dist2));
        if (idx < 0) break;  // all mass sits on existing centers
        centers.push_back(data.X.row(idx).transpose());
        dist2 = dist2.cwiseMin(
            (data.X.rowwise() - centers.back().transpose()).rowwise().squaredNorm());
    }
    const int kk = static_cast<int>(centers.size());
    if (kk < k) return em_fit(data, kk, total_mass, rng);

    // shared initial covariance: global weighted scatter, floored
    Eigen::VectorXd gmean = data.X.transpose() * data.W;
    Eigen::MatrixXd centered = data.X.rowwise() - gmean.transpose();
    Eigen::MatrixXd gcov =
        centered.transpose() * data.W.asDiagonal() * centered;
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gcov);
        const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(kCovarianceFloor);
        gcov = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    }

    Eigen::VectorXd alpha = Eigen::VectorXd::Constant(k, 1.0 / k);
    std::vector<Eigen::VectorXd> mu = centers;
    std::vector<Eigen::MatrixXd> sigma(k, gcov);

    Eigen::MatrixXd logp(n, k);
    std::vector<int> floor_streak(k, 0);
    double q_prev = -std::numeric_limits<double>::infinity();
    bool floored_prev = false;

    for (int iter = 0; iter < 200; ++iter) {
        // E-step in the log domain
        for (int i = 0; i < k; ++i) {
            Eigen::LLT<Eigen::MatrixXd> llt(sigma[i]);
            if (llt.info() != Eigen::Success)
                return em_fit(data, k - 1, total_mass, rng);
            const double log_norm = -0.5 * d * std::log(2.0 * M_PI) -
                                    llt.matrixLLT().diagonal().array().log().sum();
            Eigen::MatrixXd Z = llt.matrixL().solve(
                (data.X.rowwise() - mu[i].transpose()).transpose());
            logp.col(i) = (std::log(alpha[i]) + log_norm) -
                          0.5 * Z.colwise().squaredNorm().transpose().array();
        }
        const Eigen::VectorXd rowmax = logp.rowwise().maxCoeff();
        Eigen::MatrixXd resp = (logp.colwise() - rowmax).array().exp();
        const Eigen::VectorXd rowsum = resp.rowwise().sum();
        const Eigen::VectorXd lse = rowmax.array() + rowsum.array().log();
        const double q = data.W.dot(lse);

        // EM ascent check; covariance flooring may step off the ascent path,
        // so the comparison resets after a floored iteration
        if (!floored_prev && q < q_prev - 1e-9 * (1.0 + std::abs(q_prev)))
            throw Error("fit_gmm: EM objective decreased");
        const bool converged = std::abs(q - q_prev) <= 1e-6;
        q_prev = q;
        if (converged) break;

        resp.array().colwise() /= rowsum.array();

        // M-step
        floored_prev = false;
        const Eigen::MatrixXd wr = data.W.asDiagonal() * resp;  // n x k
        const Eigen::VectorXd nk = wr.colwise().sum();
        for (int i = 0; i < k; ++i) {
            if (nk[i] < 1e-8) return em_fit(data, k - 1, total_mass, rng);
            alpha[i] = nk[i];
            mu[i] = data.X.transpose() * wr.col(i) / nk[i];
            const Eigen::MatrixXd c = data.X.rowwise() - mu[i].transpose();
            Eigen::MatrixXd s = c.transpose() * wr.col(i).asDiagonal() * c / nk[i];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
            if (es.eigenvalues().minCoeff() < kCovarianceFloor) {
                const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(kCovarianceFloor);
                s = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
                floored_prev = true;
                if (++floor_streak[i] >= 3) return em_fit(data, k - 1, total_mass, rng);
            } else {
                floor_streak[i] = 0;
            }
            sigma[i] = std::move(s);
        }
        alpha /= alpha.sum();
    }

    return GaussianMixture(alpha, mu, sigma, total_mass);
}

}  // namespace

GaussianMixture fit_gmm(const std::function<double(const Eigen::VectorXd&)>& w,
                        const UnitPrior& prior, int n_gmm, int n_fit_samples, Rng& rng) {
    if (n_gmm < 1) throw std::invalid_argument("fit_gmm: n_gmm must be >= 1");
    if (n_fit_samples < std::max(10, n_gmm))
        throw std::invalid_argument("fit_gmm: too few fit samples");

    const int d = prior.dim();
    Eigen::MatrixXd X(n_fit_samples, d);
    Eigen::VectorXd wt(n_fit_samples);
    double mass_acc = 0.0;
    for (int s = 0; s < n_fit_samples; ++s) {
        const Eigen::VectorXd x = prior.sample(rng);
        X.row(s) = x.transpose();
        const double ws = w(x);
        if (!std::isfinite(ws) || ws < 0.0)
            throw Error("fit_gmm: weight function returned an invalid value");
        wt[s] = ws;
        mass_acc += ws / prior.sampling_density(x);
    }
    const double total_mass = mass_acc / n_fit_samples;
    const double wsum = wt.sum();
    if (!(wsum > 0.0) || !(total_mass > 0.0))
        throw DegenerateDensity("fit_gmm: weights vanish on all samples");
    const Eigen::VectorXd W = wt / wsum;

    EmData data{X, W};
    return em_fit(data, n_gmm, total_mass, rng);
}

}  // namespace owbo
