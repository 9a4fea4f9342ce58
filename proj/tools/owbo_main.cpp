// Experiment runner: seeded BO runs with CSV/JSON output, the single-iteration
// timing sweep, and output-pdf sampling for the benchmark functions.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "owbo/acquisition_spec.hpp"
#include "owbo/bench.hpp"
#include "owbo/benchfns.hpp"
#include "owbo/bo.hpp"
#include "owbo/precursor.hpp"

#ifndef OWBO_REVISION
#define OWBO_REVISION "unknown"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Problem {
    owbo::ExperimentConfig config;
    std::function<double(const Eigen::VectorXd&)> objective;  // noise-free, unit cube
    std::optional<owbo::Truth> truth;
};

Problem resolve_problem(const std::string& function, int dim) {
    Problem p;
    if (function == "precursor") {
        if (dim != 2)
            throw std::invalid_argument("precursor objective is 2-dimensional");
        const owbo::DynSystem system;
        const owbo::PcaSubspace subspace = owbo::build_subspace(system, 100.0, 1000.0, 0.1);
        owbo::PrecursorProblem prob = owbo::precursor_objective(subspace, system, 50.0);
        p.config.objective = function;
        p.config.dim = 2;
        p.config.domain = prob.domain;
        p.config.prior = prob.prior;
        const owbo::Domain domain = prob.domain;
        const auto obj = prob.objective;
        p.objective = [domain, obj](const Eigen::VectorXd& u) {
            return obj(owbo::unrescale(domain, u));
        };
        return p;
    }
    const owbo::Benchmark bench = owbo::make_benchmark(function, dim);
    p.config.objective = function;
    p.config.dim = bench.dim;
    p.config.domain = bench.domain;
    p.config.prior = owbo::InputPrior::uniform(bench.domain);
    p.objective = owbo::unit_objective(bench);
    const owbo::BenchmarkTruth t = owbo::benchmark_truth_unit(bench);
    p.truth = owbo::Truth{t.minimizers_unit, t.min_value};
    return p;
}

void write_trace_csv(const fs::path& path, const owbo::RegretTrace& trace) {
    std::ofstream out(path, std::ios::binary);  // LF line endings on all platforms
    if (!out) throw IoError("cannot open " + path.string());
    out << "iter,simple_regret,distance,observation_regret,wall_seconds\n";
    for (const auto& rec : trace.records)
        out << rec.iter << ',' << fmt(rec.simple_regret) << ',' << fmt(rec.distance) << ','
            << fmt(rec.observation_regret) << ',' << fmt(rec.wall_seconds) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

struct ParsedTrace {
    std::vector<double> simple_regret, distance, observation_regret;
};

ParsedTrace parse_trace_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot reopen " + path.string());
    std::string line;
    std::getline(in, line);  // header
    ParsedTrace t;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<double> row;
        while (std::getline(ls, field, ','))
            row.push_back(field == "nan" ? std::numeric_limits<double>::quiet_NaN()
                                         : std::stod(field));
        t.simple_regret.push_back(row.at(1));
        t.distance.push_back(row.at(2));
        t.observation_regret.push_back(row.at(3));
    }
    return t;
}

// median and MAD/4 across seeds, per iteration; NaN columns stay NaN
void aggregate_metric(const std::vector<ParsedTrace>& traces,
                      std::vector<double> ParsedTrace::*member, int n_records,
                      std::vector<double>& med, std::vector<double>& mad4) {
    med.assign(n_records, std::numeric_limits<double>::quiet_NaN());
    mad4.assign(n_records, std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < n_records; ++i) {
        std::vector<double> vals;
        for (const auto& t : traces) {
            const auto& seq = t.*member;
            if (i < static_cast<int>(seq.size()) && !std::isnan(seq[i]))
                vals.push_back(seq[i]);
        }
        if (vals.empty()) continue;
        const double m = median_of(vals);
        std::vector<double> dev;
        dev.reserve(vals.size());
        for (const double v : vals) dev.push_back(std::abs(v - m));
        med[i] = m;
        mad4[i] = median_of(dev) / 4.0;
    }
}

json metric_json(const std::vector<double>& v) {
    json arr = json::array();
    for (const double x : v)
        arr.push_back(std::isnan(x) ? json() : json(x));
    return arr;
}

// flat key=value config file for the run subcommand; keys mirror the flag
// names and explicitly given flags take precedence over file values
void apply_run_config(const CLI::App& run, const std::string& path, std::string& function,
                      int& dim, std::string& acq, int& iters, int& init, int& repeats,
                      std::uint64_t& seed, double& noise, int& ngmm, long& nsamples,
                      std::string& out_dir, int& jobs) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot read " + path);

    const auto trim = [](const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    static const std::set<std::string> keys = {"function", "dim",  "acq",      "iters",
                                               "init",     "repeats", "seed",  "noise",
                                               "ngmm",     "nsamples", "out",  "jobs"};

    std::string line;
    while (std::getline(in, line)) {
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key=value, got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (keys.count(key) == 0)
            throw std::invalid_argument("config: unknown key '" + key + "'");
        if (run.count("--" + key) > 0) continue;

        const auto bad = [&] {
            return std::invalid_argument("config: bad value for '" + key + "'");
        };
        const auto integer = [&] {
            size_t pos = 0;
            long long r = 0;
            try {
                r = std::stoll(value, &pos);
            } catch (...) {
                throw bad();
            }
            if (pos != value.size()) throw bad();
            return r;
        };
        if (key == "function") function = value;
        else if (key == "acq") acq = value;
        else if (key == "out") out_dir = value;
        else if (key == "dim") dim = static_cast<int>(integer());
        else if (key == "iters") iters = static_cast<int>(integer());
        else if (key == "init") init = static_cast<int>(integer());
        else if (key == "repeats") repeats = static_cast<int>(integer());
        else if (key == "ngmm") ngmm = static_cast<int>(integer());
        else if (key == "nsamples") nsamples = static_cast<long>(integer());
        else if (key == "jobs") jobs = static_cast<int>(integer());
        else if (key == "seed") {
            const long long v = integer();
            if (v < 0) throw bad();
            seed = static_cast<std::uint64_t>(v);
        } else if (key == "noise") {
            size_t pos = 0;
            try {
                noise = std::stod(value, &pos);
            } catch (...) {
                throw bad();
            }
            if (pos != value.size()) throw bad();
        }
    }
}

int cmd_run(const std::string& function, int dim, const std::string& acq, int iters,
            int init, int repeats, std::uint64_t seed, double noise, int ngmm,
            long nsamples, const std::string& out_dir, int jobs) {
    if (iters < 0) throw std::invalid_argument("run: iters must be >= 0");
    if (repeats < 1) throw std::invalid_argument("run: repeats must be >= 1");
    if (jobs < 1) throw std::invalid_argument("run: jobs must be >= 1");
    Problem problem = resolve_problem(function, dim);
    problem.config.acquisition.kind = owbo::parse_acq(acq);
    problem.config.n_iter = iters;
    problem.config.n_init = init > 0 ? init : (problem.config.dim == 2 ? 3 : 10);
    problem.config.noise_variance = noise;
    problem.config.n_gmm = ngmm;
    problem.config.n_samples_kde = static_cast<int>(nsamples);
    problem.config.validate();

    fs::create_directories(out_dir);
    const std::string stem = function + "_" + acq;

    std::vector<owbo::RegretTrace> traces(repeats);
    std::atomic<int> next{0};
    const auto worker = [&] {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= repeats) break;
            owbo::ExperimentConfig cfg = problem.config;
            cfg.seed = seed + static_cast<std::uint64_t>(i);
            try {
                traces[i] = owbo::run(cfg, problem.objective,
                                      problem.truth ? &*problem.truth : nullptr);
            } catch (const std::exception& e) {
                traces[i].failed = true;
                traces[i].failure_message = e.what();
            }
        }
    };
    const int n_threads = std::max(1, jobs);
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads - 1; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::vector<std::string> seed_files;
    json failed = json::array();
    for (int i = 0; i < repeats; ++i) {
        const fs::path path =
            fs::path(out_dir) / (stem + "_seed" + std::to_string(seed + i) + ".csv");
        write_trace_csv(path, traces[i]);
        seed_files.push_back(path.string());
        if (traces[i].failed)
            failed.push_back({{"seed", seed + i}, {"message", traces[i].failure_message}});
    }

    // aggregates come from the written files so the manifest matches a
    // re-computation from the CSVs exactly
    std::vector<ParsedTrace> parsed;
    for (int i = 0; i < repeats; ++i)
        if (!traces[i].failed) parsed.push_back(parse_trace_csv(seed_files[i]));
    const int n_records = iters + 1;

    json manifest;
    manifest["config"] = {{"function", function},
                          {"dim", problem.config.dim},
                          {"acq", acq},
                          {"iters", iters},
                          {"init", problem.config.n_init},
                          {"repeats", repeats},
                          {"seed", seed},
                          {"noise", noise},
                          {"ngmm", ngmm},
                          {"nsamples", nsamples}};
    manifest["revision"] = OWBO_REVISION;
    manifest["generated_at_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    manifest["seed_files"] = seed_files;
    manifest["failed_seeds"] = failed;

    json agg;
    json iter_arr = json::array();
    for (int i = 0; i < n_records; ++i) iter_arr.push_back(i);
    agg["iter"] = iter_arr;
    std::vector<double> med, mad4;
    aggregate_metric(parsed, &ParsedTrace::simple_regret, n_records, med, mad4);
    agg["simple_regret_median"] = metric_json(med);
    agg["simple_regret_mad4"] = metric_json(mad4);
    aggregate_metric(parsed, &ParsedTrace::distance, n_records, med, mad4);
    agg["distance_median"] = metric_json(med);
    agg["distance_mad4"] = metric_json(mad4);
    aggregate_metric(parsed, &ParsedTrace::observation_regret, n_records, med, mad4);
    agg["observation_regret_median"] = metric_json(med);
    agg["observation_regret_mad4"] = metric_json(mad4);
    manifest["aggregate"] = agg;

    const fs::path manifest_path = fs::path(out_dir) / (stem + "_manifest.json");
    std::ofstream mout(manifest_path, std::ios::binary);
    if (!mout) throw IoError("cannot open " + manifest_path.string());
    mout << manifest.dump(2) << '\n';
    if (!mout) throw IoError("write failed for " + manifest_path.string());

    if (!failed.empty()) {
        std::cerr << failed.size() << " of " << repeats << " seeds failed\n";
        return kExitPartial;
    }
    return kExitOk;
}

int cmd_bench(const std::string& param, std::vector<double> values,
              std::vector<std::string> acqs, int repeats, std::uint64_t seed,
              const std::string& out_file) {
    std::string internal;
    if (param == "nsamples") internal = "n_samples";
    else if (param == "ngmm") internal = "n_gmm";
    else if (param == "dim") internal = "d";
    else throw std::invalid_argument("bench: --param must be nsamples, ngmm, or dim");

    if (values.empty()) {
        if (internal == "n_samples") values = {1e3, 1e4, 1e5};
        else if (internal == "n_gmm") values = {1, 2, 4, 8};
        else values = {2, 4, 8};
    }
    if (acqs.empty()) acqs = {"lcb", "lcb-lw", "ivr-bo", "ivr-lwbo"};
    std::vector<owbo::AcquisitionSpec> specs;
    for (const auto& a : acqs) specs.push_back(owbo::AcquisitionSpec{owbo::parse_acq(a)});

    const auto rows = owbo::bench_sweep(internal, values, specs, repeats, seed);

    std::ostringstream csv;
    csv << "param,value,acq,median_seconds\n";
    for (const auto& row : rows)
        csv << row.param << ',' << fmt(row.value) << ',' << row.acq << ','
            << fmt(row.median_seconds) << '\n';

    if (out_file.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_file, std::ios::binary);
        if (!out) throw IoError("cannot open " + out_file);
        out << csv.str();
        if (!out) throw IoError("write failed for " + out_file);
    }
    return kExitOk;
}

int cmd_pdf(const std::string& function, int dim, long nsamples, std::uint64_t seed,
            const std::string& out_file) {
    const owbo::Benchmark bench = owbo::make_benchmark(function, dim);
    owbo::Rng rng(seed);
    const owbo::Kde1d kde = owbo::output_pdf(bench, static_cast<int>(nsamples), rng);

    std::ostringstream csv;
    csv << "value,density\n";
    for (int i = 0; i < kde.grid.size(); ++i)
        csv << fmt(kde.grid[i]) << ',' << fmt(kde.density[i]) << '\n';

    if (out_file.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_file, std::ios::binary);
        if (!out) throw IoError("cannot open " + out_file);
        out << csv.str();
        if (!out) throw IoError("write failed for " + out_file);
    }
    return kExitOk;
}

int cmd_list() {
    std::cout << "functions:";
    for (const auto& n : owbo::benchmark_names()) std::cout << ' ' << n;
    std::cout << " precursor\nacquisitions:";
    for (const auto k : {owbo::AcqKind::pi, owbo::AcqKind::ei, owbo::AcqKind::lcb,
                         owbo::AcqKind::lcb_lw, owbo::AcqKind::ivr, owbo::AcqKind::ivr_bo,
                         owbo::AcqKind::ivr_lw, owbo::AcqKind::ivr_lwbo})
        std::cout << ' ' << owbo::acq_name(k);
    std::cout << "\nrevision: " << OWBO_REVISION << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Output-weighted Bayesian optimization experiment runner"};
    app.require_subcommand(1);

    std::string function = "ackley", acq = "ei", out_dir = "results", out_file;
    std::string param = "ngmm";
    int dim = 2, iters = 60, init = -1, repeats = 20, jobs = 1;
    std::uint64_t seed = 0;
    double noise = 1e-3;
    int ngmm = 2;
    long nsamples = 100000;
    std::vector<double> values;
    std::vector<std::string> acqs;

    CLI::App* run = app.add_subcommand("run", "execute seeded BO runs");
    run->add_option("--function", function, "objective name (see list)");
    run->add_option("--dim", dim, "dimension for ackley/michalewicz");
    run->add_option("--acq", acq, "acquisition rule");
    run->add_option("--iters", iters, "BO iterations")->check(CLI::NonNegativeNumber);
    run->add_option("--init", init, "initial design size (default: 3 when d=2, else 10)");
    run->add_option("--repeats", repeats, "number of seeded runs")
        ->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "base seed; run i uses seed+i");
    run->add_option("--noise", noise, "observation noise variance factor")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--ngmm", ngmm, "mixture components")->check(CLI::PositiveNumber);
    run->add_option("--nsamples", nsamples, "posterior-mean samples for the KDE");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    std::string config_path;
    run->add_option("--config", config_path, "flat key=value config file; flags override");

    CLI::App* bench = app.add_subcommand("bench", "single-iteration timing sweep");
    bench->add_option("--param", param, "sweep parameter: nsamples, ngmm, or dim");
    bench->add_option("--values", values, "sweep values (default per parameter)");
    bench->add_option("--acq", acqs, "acquisition rules (repeatable)");
    bench->add_option("--repeats", repeats, "timing repeats per point")
        ->check(CLI::PositiveNumber);
    bench->add_option("--seed", seed, "base seed");
    bench->add_option("--out", out_file, "output CSV file (default stdout)");

    CLI::App* pdf = app.add_subcommand("pdf", "output-density KDE of a benchmark");
    pdf->add_option("--function", function, "benchmark name");
    pdf->add_option("--dim", dim, "dimension for ackley/michalewicz");
    pdf->add_option("--nsamples", nsamples, "uniform domain samples");
    pdf->add_option("--seed", seed, "sampling seed");
    pdf->add_option("--out", out_file, "output CSV file (default stdout)");

    CLI::App* list = app.add_subcommand("list", "list functions and acquisitions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (run->parsed()) {
            if (!config_path.empty())
                apply_run_config(*run, config_path, function, dim, acq, iters, init,
                                 repeats, seed, noise, ngmm, nsamples, out_dir, jobs);
            return cmd_run(function, dim, acq, iters, init, repeats, seed, noise, ngmm,
                           nsamples, out_dir, jobs);
        }
        if (bench->parsed()) return cmd_bench(param, values, acqs, repeats, seed, out_file);
        if (pdf->parsed()) return cmd_pdf(function, dim, nsamples, seed, out_file);
        if (list->parsed()) return cmd_list();
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
