#include "owbo/benchfns.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "owbo/optim.hpp"

namespace owbo {

namespace {

// ---- raw function definitions -------------------------------------------

double ackley(const Eigen::VectorXd& x) {
    const double a = 20.0, b = 0.2, c = 2.0 * M_PI;
    const double d = static_cast<double>(x.size());
    const double s1 = std::sqrt(x.squaredNorm() / d);
    const double s2 = (c * x.array()).cos().sum() / d;
    return -a * std::exp(-b * s1) - std::exp(s2) + a + std::exp(1.0);
}

double branin(const Eigen::VectorXd& x) {
    const double a = 1.0;
    const double b = 5.1 / (4.0 * M_PI * M_PI);
    const double c = 5.0 / M_PI;
    const double r = 6.0, s = 10.0, t = 1.0 / (8.0 * M_PI);
    const double inner = x[1] - b * x[0] * x[0] + c * x[0] - r;
    return a * inner * inner + s * (1.0 - t) * std::cos(x[0]) + s;
}

double bukin(const Eigen::VectorXd& x) {
    return 100.0 * std::sqrt(std::abs(x[1] - 0.01 * x[0] * x[0])) +
           0.01 * std::abs(x[0] + 10.0);
}

double michalewicz_term(int i, double xi) {
    const double s = std::sin(static_cast<double>(i) * xi * xi / M_PI);
    const double s2 = s * s;
    return -std::sin(xi) * std::pow(s2, 10);  // m = 10
}

double michalewicz(const Eigen::VectorXd& x) {
    double acc = 0.0;
    for (int i = 0; i < x.size(); ++i) acc += michalewicz_term(i + 1, x[i]);
    return acc;
}

double hartmann6(const Eigen::VectorXd& x) {
    static const double a[4] = {1.0, 1.2, 3.0, 3.2};
    static const double A[4][6] = {{10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
                                   {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
                                   {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
                                   {17.0, 8.0, 0.05, 10.0, 0.1, 14.0}};
    static const double P[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                   {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                   {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                   {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
        double e = 0.0;
        for (int j = 0; j < 6; ++j) {
            const double dj = x[j] - P[i][j];
            e += A[i][j] * dj * dj;
        }
        acc -= a[i] * std::exp(-e);
    }
    return acc;
}

// ---- brute-force reference oracles ---------------------------------------

// coordinate-descent pattern refine; assumes a smooth basin around x
Eigen::VectorXd compass_refine(const std::function<double(const Eigen::VectorXd&)>& f,
                               Eigen::VectorXd x, const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper, double step) {
    const int d = static_cast<int>(x.size());
    double fx = f(x);
    while (step > 1e-13) {
        bool improved = false;
        for (int j = 0; j < d; ++j) {
            for (const double sgn : {1.0, -1.0}) {
                Eigen::VectorXd xt = x;
                xt[j] = std::min(upper[j], std::max(lower[j], x[j] + sgn * step));
                const double ft = f(xt);
                if (ft < fx) {
                    fx = ft;
                    x = xt;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return x;
}

// Michalewicz is a sum of per-coordinate terms, so the global minimizer is
// found one coordinate at a time: dense grid plus pattern refine
std::pair<Eigen::VectorXd, double> michalewicz_oracle(int d) {
    Eigen::VectorXd xstar(d);
    for (int i = 1; i <= d; ++i) {
        const auto term = [i](const Eigen::VectorXd& t) { return michalewicz_term(i, t[0]); };
        const int grid = 20001;
        double best_x = 0.0, best_f = 0.0;
        for (int g = 0; g < grid; ++g) {
            const double t = M_PI * g / (grid - 1);
            const double ft = michalewicz_term(i, t);
            if (ft < best_f) {
                best_f = ft;
                best_x = t;
            }
        }
        Eigen::VectorXd seed(1), lo(1), hi(1);
        seed[0] = best_x;
        lo[0] = 0.0;
        hi[0] = M_PI;
        xstar[i - 1] = compass_refine(term, seed, lo, hi, M_PI / grid)[0];
    }
    return {xstar, michalewicz(xstar)};
}

std::pair<Eigen::VectorXd, double> multistart_oracle(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& lower,
    const Eigen::VectorXd& upper, int n_starts, int n_refine) {
    const int d = static_cast<int>(lower.size());
    Rng rng(0x0f1cfULL);
    const Eigen::MatrixXd design = lhs(n_starts, d, rng);
    std::vector<std::pair<double, int>> ranked(n_starts);
    const Eigen::VectorXd range = upper - lower;
    for (int s = 0; s < n_starts; ++s) {
        const Eigen::VectorXd x = lower + design.row(s).transpose().cwiseProduct(range);
        ranked[s] = {f(x), s};
    }
    std::sort(ranked.begin(), ranked.end());
    Eigen::VectorXd best;
    double best_f = std::numeric_limits<double>::infinity();
    for (int k = 0; k < std::min(n_refine, n_starts); ++k) {
        const Eigen::VectorXd x0 =
            lower + design.row(ranked[k].second).transpose().cwiseProduct(range);
        const Eigen::VectorXd x = compass_refine(f, x0, lower, upper, 0.05);
        const double fx = f(x);
        if (fx < best_f) {
            best_f = fx;
            best = x;
        }
    }
    return {best, best_f};
}

// ---- fixture data ---------------------------------------------------------

// regenerated by tools/gen_fixtures; must stay identical to fixtures/benchmarks.txt
const char* kEmbeddedFixtures = R"FIX(
# Benchmark reference data, derived by the built-in brute-force oracles
# (dense grid / separable scan / multistart with pattern refine).
# Regenerate with: gen-fixtures > fixtures/benchmarks.txt

[ackley d=2]
lower = -32.768000000000001 -32.768000000000001
upper = 32.768000000000001 32.768000000000001
min_value = 4.4408920985006262e-16
minimizer = 0 0
oracle = analytic (both exponential terms peak at the origin)

[branin d=2]
lower = -5 0
upper = 10 15
min_value = 0.39788735772973816
minimizer = 3.1415926535897931 2.2749999999999999
minimizer = -3.1415926535897931 12.275
minimizer = 9.4247779607693793 2.4749999999999996
oracle = stationarity (sin x1 = 0 with the parabola term zeroed); min over the three roots

[bukin d=2]
lower = -15 -3
upper = -5 3
min_value = 0
minimizer = -10 1
oracle = analytic (both absolute-value terms vanish)

[michalewicz d=2]
lower = 0 0
upper = 3.1415926535897931 3.1415926535897931
min_value = -1.8013034100985537
minimizer = 2.202905524338088 1.5707963267948966
oracle = separable per-coordinate dense grid + pattern refine

[michalewicz d=10]
lower = 0 0 0 0 0 0 0 0 0 0
upper = 3.1415926535897931 3.1415926535897931 3.1415926535897931 3.1415926535897931 3.1415926535897931 3.1415926535897931 3.1415926535897931 3.1415926535897931 3.1415926535897931 3.1415926535897931
min_value = -9.6601517156413479
minimizer = 2.202905524338088 1.5707963267948966 1.2849915712124587 1.9230584678966713 1.7204697725816269 1.5707963267948966 1.4544139713250013 1.7560865212940411 1.6557174173287157 1.5707963267948966
oracle = separable per-coordinate dense grid + pattern refine

[hartmann6 d=6]
lower = 0 0 0 0 0 0
upper = 1 1 1 1 1 1
min_value = -3.3223680114155152
minimizer = 0.20168950994089127 0.15001069183033433 0.4768739733665403 0.27533243215622821 0.31165161641677858 0.6573005336070461
oracle = 1e4 LHS multistart + pattern refine

)FIX";

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

Eigen::VectorXd parse_vector(const std::string& text) {
    std::istringstream in(text);
    std::vector<double> vals;
    double v;
    while (in >> v) vals.push_back(v);
    return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

}  // namespace

std::string fixture_key(const std::string& name, int d) {
    return name + " d=" + std::to_string(d);
}

std::vector<std::pair<std::string, FixtureEntry>> parse_fixture_text(const std::string& text) {
    std::vector<std::pair<std::string, FixtureEntry>> out;
    std::istringstream in(text);
    std::string line;
    FixtureEntry* cur = nullptr;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            out.emplace_back(trim(line.substr(1, line.size() - 2)), FixtureEntry{});
            cur = &out.back().second;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos || cur == nullptr)
            throw Error("fixture parse error: '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "lower") cur->lower = parse_vector(val);
        else if (key == "upper") cur->upper = parse_vector(val);
        else if (key == "min_value") cur->min_value = std::stod(val);
        else if (key == "minimizer") cur->minimizers.push_back(parse_vector(val));
        else if (key == "oracle") { /* provenance note, not data */ }
        else throw Error("fixture parse error: unknown key '" + key + "'");
    }
    return out;
}

const std::vector<std::pair<std::string, FixtureEntry>>& fixture_store() {
    static std::map<std::string, std::vector<std::pair<std::string, FixtureEntry>>> cache;
    const char* env = std::getenv("OWBO_FIXTURES");
    const std::string source = env ? env : "";
    auto it = cache.find(source);
    if (it != cache.end()) return it->second;
    std::string text;
    if (source.empty()) {
        text = kEmbeddedFixtures;
    } else {
        std::ifstream in(source);
        if (!in) throw Error("cannot open fixture file: " + source);
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    return cache.emplace(source, parse_fixture_text(text)).first->second;
}

namespace {

const FixtureEntry* find_fixture(const std::string& name, int d) {
    const std::string key = fixture_key(name, d);
    for (const auto& [k, entry] : fixture_store())
        if (k == key) return &entry;
    return nullptr;
}

}  // namespace

const std::vector<std::string>& benchmark_names() {
    static const std::vector<std::string> names = {"ackley", "branin", "bukin",
                                                   "michalewicz", "hartmann6"};
    return names;
}

Benchmark make_benchmark(const std::string& name, int d) {
    Benchmark b;
    b.name = name;
    b.dim = d;
    if (name == "ackley") {
        if (d < 1) throw std::invalid_argument("ackley: dimension must be >= 1");
        b.domain = Domain(Eigen::VectorXd::Constant(d, -32.768),
                          Eigen::VectorXd::Constant(d, 32.768));
        b.evaluate = ackley;
    } else if (name == "branin") {
        if (d != 2) throw std::invalid_argument("branin is 2-dimensional");
        Eigen::VectorXd lo(2), hi(2);
        lo << -5.0, 0.0;
        hi << 10.0, 15.0;
        b.domain = Domain(lo, hi);
        b.evaluate = branin;
    } else if (name == "bukin") {
        if (d != 2) throw std::invalid_argument("bukin is 2-dimensional");
        Eigen::VectorXd lo(2), hi(2);
        lo << -15.0, -3.0;
        hi << -5.0, 3.0;
        b.domain = Domain(lo, hi);
        b.evaluate = bukin;
    } else if (name == "michalewicz") {
        if (d < 1) throw std::invalid_argument("michalewicz: dimension must be >= 1");
        b.domain = Domain(Eigen::VectorXd::Zero(d), Eigen::VectorXd::Constant(d, M_PI));
        b.evaluate = michalewicz;
    } else if (name == "hartmann6") {
        if (d != 6) throw std::invalid_argument("hartmann6 is 6-dimensional");
        b.domain = Domain(Eigen::VectorXd::Zero(6), Eigen::VectorXd::Ones(6));
        b.evaluate = hartmann6;
    } else {
        throw std::invalid_argument("unknown benchmark: " + name);
    }

    if (const FixtureEntry* fx = find_fixture(name, d)) {
        for (const auto& m : fx->minimizers)
            if (m.size() != d) throw Error("fixture minimizer dimension mismatch for " + name);
        b.true_minimizers = fx->minimizers;
        b.true_min_value = fx->min_value;
        return b;
    }

    // no fixture entry: fall back to the same oracles that generated the fixtures
    if (name == "ackley") {
        b.true_minimizers = {Eigen::VectorXd::Zero(d)};
        b.true_min_value = ackley(b.true_minimizers[0]);
    } else if (name == "michalewicz") {
        auto [x, f] = michalewicz_oracle(d);
        b.true_minimizers = {x};
        b.true_min_value = f;
    } else if (name == "hartmann6") {
        auto [x, f] = multistart_oracle(hartmann6, b.domain.lower, b.domain.upper, 10000, 10);
        b.true_minimizers = {x};
        b.true_min_value = f;
    } else if (name == "branin") {
        // stationary points: sin(x1) = 0 with the parabola term zeroed
        const double bb = 5.1 / (4.0 * M_PI * M_PI), cc = 5.0 / M_PI, rr = 6.0;
        b.true_minimizers.clear();
        for (const double x1 : {M_PI, -M_PI, 3.0 * M_PI}) {
            Eigen::VectorXd m(2);
            m << x1, bb * x1 * x1 - cc * x1 + rr;
            b.true_minimizers.push_back(m);
        }
        double mv = std::numeric_limits<double>::infinity();
        for (const auto& m : b.true_minimizers) mv = std::min(mv, branin(m));
        b.true_min_value = mv;
    } else {
        Eigen::VectorXd m(2);
        m << -10.0, 1.0;
        b.true_minimizers = {m};
        b.true_min_value = bukin(m);
    }
    return b;
}

std::function<double(const Eigen::VectorXd&)> unit_objective(const Benchmark& bench) {
    const Domain domain = bench.domain;
    const auto eval = bench.evaluate;
    return [domain, eval](const Eigen::VectorXd& u) { return eval(unrescale(domain, u)); };
}

BenchmarkTruth benchmark_truth_unit(const Benchmark& bench) {
    BenchmarkTruth t;
    t.min_value = bench.true_min_value;
    for (const auto& m : bench.true_minimizers)
        t.minimizers_unit.push_back(rescale_to_unit(bench.domain, m));
    return t;
}

std::function<double(const Eigen::VectorXd&)> noisy_unit_wrapper(const Benchmark& bench,
                                                                 double sigma_eps2, Rng rng) {
    if (sigma_eps2 < 0.0) throw std::invalid_argument("noisy_unit_wrapper: sigma_eps2 < 0");
    const auto base = unit_objective(bench);

    Rng probe_rng = rng.substream(0);
    const Eigen::MatrixXd probes = lhs(1000, bench.dim, probe_rng);
    Eigen::VectorXd vals(probes.rows());
    for (int i = 0; i < probes.rows(); ++i) vals[i] = base(probes.row(i).transpose());
    const double var0 = (vals.array() - vals.mean()).square().mean();
    const double sd = std::sqrt(sigma_eps2 * (var0 > 0.0 ? var0 : 1.0));

    auto noise = std::make_shared<Rng>(rng.substream(1));
    return [base, sd, noise](const Eigen::VectorXd& u) {
        const double f = base(u);
        return sd > 0.0 ? f + sd * noise->normal() : f;
    };
}

Kde1d output_pdf(const Benchmark& bench, int n_samples, Rng& rng) {
    if (n_samples < 1000) throw std::invalid_argument("output_pdf: need at least 1e3 samples");
    Eigen::VectorXd outputs(n_samples);
    const Eigen::VectorXd range = bench.domain.upper - bench.domain.lower;
    for (int s = 0; s < n_samples; ++s) {
        const Eigen::VectorXd x =
            bench.domain.lower + rng.uniform_vector(bench.dim).cwiseProduct(range);
        outputs[s] = bench.evaluate(x);
    }
    return kde_1d(outputs);
}

}  // namespace owbo
