#include "owbo/core.hpp"

#include <cmath>

namespace owbo {

namespace {

double normal_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

Domain::Domain(Eigen::VectorXd lo, Eigen::VectorXd hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size() || lower.size() < 1)
        throw std::invalid_argument("Domain: mismatched or empty bounds");
    for (int i = 0; i < lower.size(); ++i)
        if (!(lower[i] < upper[i]))
            throw std::invalid_argument("Domain: lower[i] must be < upper[i]");
}

Domain Domain::unit_cube(int d) {
    return Domain(Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d));
}

double Domain::volume() const { return (upper - lower).prod(); }

bool Domain::contains(const Eigen::VectorXd& x, double slack) const {
    if (x.size() != lower.size()) return false;
    for (int i = 0; i < x.size(); ++i)
        if (x[i] < lower[i] - slack || x[i] > upper[i] + slack) return false;
    return true;
}

Eigen::VectorXd rescale_to_unit(const Domain& domain, const Eigen::VectorXd& x) {
    if (!domain.contains(x))
        throw std::invalid_argument("rescale_to_unit: point outside domain");
    return (x - domain.lower).cwiseQuotient(domain.upper - domain.lower);
}

Eigen::VectorXd unrescale(const Domain& domain, const Eigen::VectorXd& u) {
    if (u.size() != domain.dim())
        throw std::invalid_argument("unrescale: dimension mismatch");
    return domain.lower + u.cwiseProduct(domain.upper - domain.lower);
}

Dataset::Dataset(Domain domain) : domain_(std::move(domain)) {}

void Dataset::append(const Eigen::VectorXd& x, double y) {
    if (x.size() != domain_.dim())
        throw std::invalid_argument("Dataset::append: dimension mismatch");
    if (!domain_.contains(x))
        throw std::invalid_argument("Dataset::append: point outside domain");
    if (n_ == inputs_.rows()) {
        const int cap = std::max(8, 2 * n_);
        inputs_.conservativeResize(cap, domain_.dim());
        outputs_.conservativeResize(cap);
    }
    inputs_.row(n_) = x.transpose();
    outputs_[n_] = y;
    ++n_;
}

InputPrior::InputPrior(Kind k, Domain d, Eigen::VectorXd v)
    : kind_(k), domain_(std::move(d)), variances_(std::move(v)) {
    if (kind_ == Kind::gaussian_diagonal) {
        if (variances_.size() != domain_.dim())
            throw std::invalid_argument("InputPrior: variance dimension mismatch");
        if ((variances_.array() <= 0.0).any())
            throw std::invalid_argument("InputPrior: variances must be positive");
        truncated_mass_ = 1.0;
        for (int i = 0; i < domain_.dim(); ++i) {
            const double sd = std::sqrt(variances_[i]);
            truncated_mass_ *=
                normal_cdf(domain_.upper[i] / sd) - normal_cdf(domain_.lower[i] / sd);
        }
        if (truncated_mass_ <= 0.0)
            throw std::invalid_argument("InputPrior: domain carries no prior mass");
    }
}

InputPrior InputPrior::uniform(Domain domain) {
    return InputPrior(Kind::uniform, std::move(domain), Eigen::VectorXd());
}

InputPrior InputPrior::gaussian_diagonal(Domain domain, Eigen::VectorXd variances) {
    return InputPrior(Kind::gaussian_diagonal, std::move(domain), std::move(variances));
}

double InputPrior::density(const Eigen::VectorXd& x) const {
    if (kind_ == Kind::uniform)
        return domain_.contains(x) ? 1.0 / domain_.volume() : 0.0;
    double p = 1.0;
    for (int i = 0; i < x.size(); ++i) p *= normal_pdf(x[i], 0.0, std::sqrt(variances_[i]));
    return p;
}

double InputPrior::sampling_density(const Eigen::VectorXd& x) const {
    if (!domain_.contains(x)) return 0.0;
    if (kind_ == Kind::uniform) return 1.0 / domain_.volume();
    return density(x) / truncated_mass_;
}

Eigen::VectorXd InputPrior::sample(Rng& rng) const {
    const int d = domain_.dim();
    Eigen::VectorXd x(d);
    if (kind_ == Kind::uniform) {
        for (int i = 0; i < d; ++i) x[i] = rng.uniform(domain_.lower[i], domain_.upper[i]);
        return x;
    }
    for (int i = 0; i < d; ++i) {
        const double sd = std::sqrt(variances_[i]);
        double v = sd * rng.normal();
        int tries = 0;
        while (v < domain_.lower[i] || v > domain_.upper[i]) {
            if (++tries > 100000)
                throw Error("InputPrior::sample: truncated-normal rejection stalled");
            v = sd * rng.normal();
        }
        x[i] = v;
    }
    return x;
}

UnitPrior::UnitPrior(const InputPrior& prior, const Domain& domain)
    : kind_(prior.kind()), d_(domain.dim()) {
    if (prior.domain().dim() != domain.dim())
        throw std::invalid_argument("UnitPrior: prior/domain dimension mismatch");
    if (kind_ == InputPrior::Kind::gaussian_diagonal) {
        const Eigen::VectorXd range = domain.upper - domain.lower;
        mean_u_ = (-domain.lower.array() / range.array()).matrix();
        std_u_ = (prior.variances().array().sqrt() / range.array()).matrix();
        truncated_mass_ = 1.0;
        for (int i = 0; i < d_; ++i)
            truncated_mass_ *= normal_cdf((1.0 - mean_u_[i]) / std_u_[i]) -
                               normal_cdf((0.0 - mean_u_[i]) / std_u_[i]);
        if (truncated_mass_ <= 0.0)
            throw std::invalid_argument("UnitPrior: domain carries no prior mass");
    }
}

double UnitPrior::density(const Eigen::VectorXd& u) const {
    if (u.size() != d_) throw std::invalid_argument("UnitPrior::density: dimension mismatch");
    for (int i = 0; i < d_; ++i)
        if (u[i] < -1e-12 || u[i] > 1.0 + 1e-12) return 0.0;
    if (kind_ == InputPrior::Kind::uniform) return 1.0;
    double p = 1.0;
    for (int i = 0; i < d_; ++i) p *= normal_pdf(u[i], mean_u_[i], std_u_[i]);
    return p;
}

double UnitPrior::sampling_density(const Eigen::VectorXd& u) const {
    const double p = density(u);
    return kind_ == InputPrior::Kind::uniform ? p : p / truncated_mass_;
}

Eigen::VectorXd UnitPrior::sample(Rng& rng) const {
    if (kind_ == InputPrior::Kind::uniform) return rng.uniform_vector(d_);
    Eigen::VectorXd u(d_);
    for (int i = 0; i < d_; ++i) {
        double v = mean_u_[i] + std_u_[i] * rng.normal();
        int tries = 0;
        while (v < 0.0 || v > 1.0) {
            if (++tries > 100000)
                throw Error("UnitPrior::sample: truncated-normal rejection stalled");
            v = mean_u_[i] + std_u_[i] * rng.normal();
        }
        u[i] = v;
    }
    return u;
}

void ExperimentConfig::validate() const {
    if (dim < 1) throw std::invalid_argument("config: dim must be >= 1");
    if (domain.dim() != dim) throw std::invalid_argument("config: domain dimension mismatch");
    if (n_init < 1) throw std::invalid_argument("config: n_init must be >= 1");
    if (n_iter < 0) throw std::invalid_argument("config: n_iter must be >= 0");
    if (noise_variance < 0) throw std::invalid_argument("config: noise_variance must be >= 0");
    if (n_gmm < 1) throw std::invalid_argument("config: n_gmm must be >= 1");
    if (n_samples_kde < 100) throw std::invalid_argument("config: n_samples_kde must be >= 100");
    if (n_fit_samples < 10) throw std::invalid_argument("config: n_fit_samples must be >= 10");
}

}  // namespace owbo
