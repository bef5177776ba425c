#ifndef COEA_EXPERIMENT_HPP
#define COEA_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "algorithms.hpp"
#include "csv.hpp"
#include "errors.hpp"
#include "games.hpp"
#include "rng.hpp"
#include "telemetry.hpp"

namespace coea::experiment {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct GridPoint {
    std::size_t n = 100;
    std::size_t lambda = 100;
    double chi = 0.6;
    double eps = 0.01;

    friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

struct GameDescriptor {
    GameKind kind = GameKind::Diagonal;
    std::vector<std::int64_t> constraint;  // GeneralizedBoundary only, n + 1 entries

    [[nodiscard]] GameSpec build(std::size_t n) const {
        if (kind == GameKind::Diagonal) return GameSpec::diagonal(n);
        if (constraint.size() != n + 1)
            throw ConfigError("experiment: constraint table must have n + 1 entries for every grid point");
        return GameSpec::generalized(constraint);
    }
};

struct ExperimentSpec {
    std::string name = "experiment";
    Algorithm algorithm = Algorithm::CoEA;
    GameDescriptor game;
    std::vector<GridPoint> grid;
    std::uint64_t replicates = 1;
    std::uint64_t budget = 10'000'000;
    InitSpec init = InitSpec::uniform();
    std::optional<double> restart_delta;
    std::uint64_t master_seed = 1;
    TelemetryMode telemetry = TelemetryMode::Summary;
    std::filesystem::path output_dir = "out";

    [[nodiscard]] RunConfig run_config(const GridPoint& p, std::uint64_t replicate) const;

    void validate() const {
        if (replicates < 1) throw ConfigError("experiment: replicates must be at least 1");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            run_config(grid[i], 0).validate();
            static_cast<void>(game.build(grid[i].n));
        }
    }
};

/// Stream key of a run: depends on the grid point's values and the replicate
/// index only, so reordering the grid does not change any run's draws.
inline std::uint64_t stable_stream_id(const GridPoint& p, std::uint64_t replicate) {
    std::uint64_t h = splitmix64(0xC0EAULL);
    h = hash_combine(h, p.n);
    h = hash_combine(h, p.lambda);
    h = hash_combine(h, std::bit_cast<std::uint64_t>(p.chi));
    h = hash_combine(h, std::bit_cast<std::uint64_t>(p.eps));
    return hash_combine(h, replicate);
}

inline std::uint64_t run_seed(std::uint64_t master_seed, const GridPoint& p, std::uint64_t replicate) {
    return hash_combine(master_seed, stable_stream_id(p, replicate));
}

inline RunConfig ExperimentSpec::run_config(const GridPoint& p, std::uint64_t replicate) const {
    RunConfig cfg;
    cfg.n = p.n;
    cfg.lambda = p.lambda;
    cfg.chi = p.chi;
    cfg.eps = p.eps;
    cfg.init = init;
    cfg.budget = budget;
    if (restart_delta) cfg.restart_period = default_restart_period(p.n, *restart_delta);
    cfg.seed = run_seed(master_seed, p, replicate);
    cfg.stream_id = 0;
    return cfg;
}

// ---------------------------------------------------------------------------
// JSON configuration

namespace detail {

inline std::vector<json> as_list(const json& j) {
    if (j.is_array()) return std::vector<json>(j.begin(), j.end());
    return {j};
}

inline std::size_t lambda_value(const json& j, std::size_t n) {
    if (j.is_string()) {
        if (j.get<std::string>() == "n") return n;
        throw ConfigError("experiment: lambda must be an integer or \"n\"");
    }
    if (!j.is_number_integer() || j.get<std::int64_t>() < 1) throw ConfigError("experiment: lambda must be a positive integer");
    return j.get<std::size_t>();
}

inline double eps_value(const json& j, std::size_t n) {
    if (j.is_string()) {
        // Strict H < 1 only admits the optimum itself.
        if (j.get<std::string>() == "exact") return 1.0 / static_cast<double>(n);
        throw ConfigError("experiment: eps must be a number or \"exact\"");
    }
    if (!j.is_number()) throw ConfigError("experiment: eps must be a number or \"exact\"");
    return j.get<double>();
}

inline std::size_t n_value(const json& j) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 1) throw ConfigError("experiment: n must be a positive integer");
    return j.get<std::size_t>();
}

inline double chi_value(const json& j) {
    if (!j.is_number()) throw ConfigError("experiment: chi must be a number");
    return j.get<double>();
}

inline std::vector<GridPoint> parse_grid(const json& j) {
    std::vector<GridPoint> grid;
    if (j.is_array()) {
        for (const auto& e : j) {
            GridPoint p;
            p.n = n_value(e.at("n"));
            p.lambda = lambda_value(e.at("lambda"), p.n);
            p.chi = chi_value(e.at("chi"));
            p.eps = eps_value(e.at("eps"), p.n);
            grid.push_back(p);
        }
        return grid;
    }
    if (!j.is_object()) throw ConfigError("experiment: grid must be an object of lists or an array of points");
    for (const auto& n : as_list(j.at("n")))
        for (const auto& l : as_list(j.at("lambda")))
            for (const auto& c : as_list(j.at("chi")))
                for (const auto& e : as_list(j.at("eps"))) {
                    GridPoint p;
                    p.n = n_value(n);
                    p.lambda = lambda_value(l, p.n);
                    p.chi = chi_value(c);
                    p.eps = eps_value(e, p.n);
                    grid.push_back(p);
                }
    return grid;
}

inline Algorithm parse_algorithm(const std::string& s) {
    if (s == "EA") return Algorithm::EA;
    if (s == "CoEA") return Algorithm::CoEA;
    throw ConfigError("experiment: algorithm must be \"EA\" or \"CoEA\"");
}

inline InitSpec parse_init(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "uniform") return InitSpec::uniform();
        if (s == "zeros") return InitSpec::zeros();
        throw ConfigError("experiment: init must be \"uniform\", \"zeros\" or {\"fixed\": [x, y]}");
    }
    const auto& f = j.at("fixed");
    if (!f.is_array() || f.size() != 2) throw ConfigError("experiment: fixed init needs [x_ones, y_ones]");
    return InitSpec::fixed(f[0].get<std::size_t>(), f[1].get<std::size_t>());
}

inline TelemetryMode parse_telemetry(const std::string& s) {
    if (s == "off") return TelemetryMode::Off;
    if (s == "summary") return TelemetryMode::Summary;
    if (s == "full") return TelemetryMode::Full;
    throw ConfigError("experiment: telemetry must be off, summary or full");
}

inline GameDescriptor parse_game(const json& j) {
    GameDescriptor g;
    const auto kind = j.value("kind", std::string("Diagonal"));
    if (kind == "Diagonal") return g;
    if (kind != "GeneralizedBoundary") throw ConfigError("experiment: unknown game kind " + kind);
    g.kind = GameKind::GeneralizedBoundary;
    g.constraint = j.at("constraint").get<std::vector<std::int64_t>>();
    return g;
}

}  // namespace detail

inline ExperimentSpec parse_spec(const json& j) {
    if (!j.is_object()) throw ConfigError("experiment: configuration must be a JSON object");
    try {
        ExperimentSpec s;
        s.name = j.value("name", s.name);
        if (j.contains("algorithm")) s.algorithm = detail::parse_algorithm(j.at("algorithm").get<std::string>());
        if (j.contains("game")) s.game = detail::parse_game(j.at("game"));
        s.grid = detail::parse_grid(j.at("grid"));
        s.replicates = j.value("replicates", s.replicates);
        if (j.contains("budget")) s.budget = static_cast<std::uint64_t>(j.at("budget").get<double>());
        if (j.contains("init")) s.init = detail::parse_init(j.at("init"));
        if (j.contains("restart") && !j.at("restart").is_null()) s.restart_delta = j.at("restart").at("delta").get<double>();
        s.master_seed = j.value("master_seed", s.master_seed);
        if (j.contains("telemetry")) s.telemetry = detail::parse_telemetry(j.at("telemetry").get<std::string>());
        s.output_dir = j.value("output_dir", s.output_dir.string());
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("experiment: malformed configuration: ") + e.what());
    }
}

inline json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Results

struct ResultRow {
    std::string experiment;
    std::size_t n = 0;
    std::size_t lambda = 0;
    double chi = 0.0;
    double eps = 0.0;
    std::uint64_t replicate = 0;
    std::uint64_t seed = 0;
    bool hit = false;
    std::optional<std::uint64_t> hitting_evals;
    std::uint64_t generations = 0;
    std::uint64_t restarts = 0;
    std::optional<std::uint64_t> crossings;
    std::optional<std::uint64_t> cycles_successful;
    std::optional<std::uint64_t> escapes;
    double wallclock_ms = 0.0;
};

inline constexpr const char* kResultsHeader =
    "experiment,n,lambda,chi,eps,replicate,seed,hit,hitting_evals,generations,restarts,crossings,"
    "cycles_successful,escapes,wallclock_ms";

inline void write_result_row(std::ostream& os, const ResultRow& r) {
    auto opt = [](const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : std::string(); };
    os << csv::quote(r.experiment) << ',' << r.n << ',' << r.lambda << ',' << csv::format_double(r.chi) << ','
       << csv::format_double(r.eps) << ',' << r.replicate << ',' << r.seed << ',' << (r.hit ? 1 : 0) << ','
       << opt(r.hitting_evals) << ',' << r.generations << ',' << r.restarts << ',' << opt(r.crossings) << ','
       << opt(r.cycles_successful) << ',' << opt(r.escapes) << ',' << csv::format_double(r.wallclock_ms) << '\n';
}

inline void write_results(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << kResultsHeader << '\n';
    for (const auto& r : rows) write_result_row(out, r);
}

inline std::vector<ResultRow> read_results(std::istream& in) {
    auto header = csv::read_record(in);
    if (!header) throw ConfigError("results: empty file");
    std::string joined;
    for (std::size_t i = 0; i < header->size(); ++i) joined += (i ? "," : "") + (*header)[i];
    if (joined != kResultsHeader) throw ConfigError("results: header does not match the result schema");
    std::vector<ResultRow> rows;
    auto opt = [](const std::string& s, const char* what) -> std::optional<std::uint64_t> {
        if (s.empty()) return std::nullopt;
        return csv::parse_number<std::uint64_t>(s, what);
    };
    while (auto rec = csv::read_record(in)) {
        if (rec->size() == 1 && (*rec)[0].empty()) continue;
        if (rec->size() != 15) throw ConfigError("results: row has the wrong number of fields");
        const auto& f = *rec;
        ResultRow r;
        r.experiment = f[0];
        r.n = csv::parse_number<std::size_t>(f[1], "n");
        r.lambda = csv::parse_number<std::size_t>(f[2], "lambda");
        r.chi = csv::parse_number<double>(f[3], "chi");
        r.eps = csv::parse_number<double>(f[4], "eps");
        r.replicate = csv::parse_number<std::uint64_t>(f[5], "replicate");
        r.seed = csv::parse_number<std::uint64_t>(f[6], "seed");
        if (f[7] != "0" && f[7] != "1") throw ConfigError("results: hit must be 0 or 1");
        r.hit = f[7] == "1";
        r.hitting_evals = opt(f[8], "hitting_evals");
        if (r.hit != r.hitting_evals.has_value())
            throw ConfigError("results: hitting_evals must be present exactly when hit = 1");
        r.generations = csv::parse_number<std::uint64_t>(f[9], "generations");
        r.restarts = csv::parse_number<std::uint64_t>(f[10], "restarts");
        r.crossings = opt(f[11], "crossings");
        r.cycles_successful = opt(f[12], "cycles_successful");
        r.escapes = opt(f[13], "escapes");
        r.wallclock_ms = csv::parse_number<double>(f[14], "wallclock_ms");
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<ResultRow> read_results(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    return read_results(in);
}

// ---------------------------------------------------------------------------
// Summary

/// Linear-interpolation quantile of sorted data.
inline double quantile_sorted(const std::vector<double>& v, double q) {
    if (v.empty()) return 0.0;
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct GroupSummary {
    std::string experiment;
    std::size_t n = 0;
    std::size_t lambda = 0;
    double chi = 0.0;
    double eps = 0.0;
    std::uint64_t runs = 0;
    std::uint64_t hits = 0;
    // Statistics over hits only; absent without hits.
    std::optional<double> mean, median, min, max, q1, q3;

    [[nodiscard]] double success_rate() const noexcept {
        return runs == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(runs);
    }
    [[nodiscard]] double reference() const noexcept {
        return 6.0 * static_cast<double>(lambda) * static_cast<double>(n);
    }
    [[nodiscard]] std::optional<double> ratio() const {
        if (!mean) return std::nullopt;
        return *mean / reference();
    }
};

/// Groups by (experiment, n, lambda, chi, eps) in order of first appearance.
inline std::vector<GroupSummary> summarize_rows(const std::vector<ResultRow>& rows) {
    using Key = std::tuple<std::string, std::size_t, std::size_t, double, double>;
    std::map<Key, std::size_t> index;
    std::vector<GroupSummary> groups;
    std::vector<std::vector<double>> samples;
    for (const auto& r : rows) {
        const Key key{r.experiment, r.n, r.lambda, r.chi, r.eps};
        auto [it, inserted] = index.emplace(key, groups.size());
        if (inserted) {
            GroupSummary g;
            g.experiment = r.experiment;
            g.n = r.n;
            g.lambda = r.lambda;
            g.chi = r.chi;
            g.eps = r.eps;
            groups.push_back(std::move(g));
            samples.emplace_back();
        }
        auto& g = groups[it->second];
        ++g.runs;
        if (r.hit) {
            ++g.hits;
            samples[it->second].push_back(static_cast<double>(*r.hitting_evals));
        }
    }
    for (std::size_t i = 0; i < groups.size(); ++i) {
        auto& v = samples[i];
        if (v.empty()) continue;
        std::sort(v.begin(), v.end());
        double sum = 0.0;
        for (double x : v) sum += x;
        auto& g = groups[i];
        g.mean = sum / static_cast<double>(v.size());
        g.median = quantile_sorted(v, 0.5);
        g.min = v.front();
        g.max = v.back();
        g.q1 = quantile_sorted(v, 0.25);
        g.q3 = quantile_sorted(v, 0.75);
    }
    return groups;
}

inline ordered_json summary_json(const std::vector<GroupSummary>& groups) {
    ordered_json out;
    out["configurations"] = ordered_json::array();
    for (const auto& g : groups) {
        ordered_json c;
        c["experiment"] = g.experiment;
        c["n"] = g.n;
        c["lambda"] = g.lambda;
        c["chi"] = g.chi;
        c["eps"] = g.eps;
        c["runs"] = g.runs;
        c["hits"] = g.hits;
        c["success_rate"] = g.success_rate();
        if (g.mean) {
            ordered_json h;
            h["mean"] = *g.mean;
            h["median"] = *g.median;
            h["min"] = *g.min;
            h["max"] = *g.max;
            h["q1"] = *g.q1;
            h["q3"] = *g.q3;
            h["iqr"] = *g.q3 - *g.q1;
            c["hitting_evals"] = h;
            c["reference_6_lambda_n"] = g.reference();
            c["ratio"] = *g.ratio();
        }
        out["configurations"].push_back(std::move(c));
    }
    return out;
}

inline void write_summary(const std::filesystem::path& path, const std::vector<GroupSummary>& groups) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << summary_json(groups).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Execution

struct ExecutionOptions {
    unsigned jobs = 1;
    const std::atomic<bool>* cancel = nullptr;
    bool write_files = true;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;  // sorted by (grid index, replicate)
    std::vector<GroupSummary> summary;
    bool interrupted = false;
};

inline std::filesystem::path telemetry_path(const ExperimentSpec& spec, std::size_t grid_index, std::uint64_t replicate) {
    return spec.output_dir / "telemetry" /
           ("run_g" + std::to_string(grid_index) + "_r" + std::to_string(replicate) + ".csv");
}

inline ResultRow execute_run(const ExperimentSpec& spec, std::size_t grid_index, std::uint64_t replicate,
                             const std::atomic<bool>* cancel, bool* cancelled, bool write_files = true) {
    const GridPoint& p = spec.grid[grid_index];
    const RunConfig cfg = spec.run_config(p, replicate);
    const GameSpec game = spec.game.build(p.n);

    RunOptions opts;
    opts.telemetry = spec.telemetry;
    opts.cancel = cancel;
    std::ofstream tel_out;
    if (spec.telemetry == TelemetryMode::Full && write_files) {
        tel_out.open(telemetry_path(spec, grid_index, replicate), std::ios::binary);
        if (!tel_out) throw ConfigError("cannot write telemetry file");
        tel_out << kGenerationCsvHeader << '\n';
        opts.sink = [&tel_out](const GenerationRecord& r) { write_csv_row(tel_out, r); };
    }
    RunTelemetry telemetry(static_cast<std::int64_t>(cfg.n), coea::detail::default_tube(cfg), spec.telemetry, opts.sink);
    // Rows go straight to disk.
    telemetry.set_buffering(false);

    const auto start = std::chrono::steady_clock::now();
    const RunOutcome outcome = run(spec.algorithm, cfg, game, opts, &telemetry);
    const auto stop = std::chrono::steady_clock::now();
    *cancelled = outcome.cancelled;

    ResultRow row;
    row.experiment = spec.name;
    row.n = p.n;
    row.lambda = p.lambda;
    row.chi = p.chi;
    row.eps = p.eps;
    row.replicate = replicate;
    row.seed = cfg.seed;
    row.hit = outcome.hit;
    row.hitting_evals = outcome.hitting_evals;
    row.generations = outcome.generations;
    row.restarts = outcome.restarts;
    if (spec.telemetry != TelemetryMode::Off) {
        row.crossings = outcome.stats.crossings;
        row.cycles_successful = outcome.stats.cycles_successful;
        row.escapes = outcome.stats.escapes;
    }
    row.wallclock_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    return row;
}

/**
 * Runs every (grid point, replicate) pair on a pool of `jobs` workers and
 * writes results.csv, summary.json and, in full telemetry mode, one CSV per
 * run under telemetry/. Rows are ordered by (grid index, replicate)
 * regardless of completion order. On cancellation the completed rows are
 * still written and `interrupted` is set.
 */
inline ExperimentResult run_experiment(const ExperimentSpec& spec, const ExecutionOptions& exec = {}) {
    spec.validate();
    if (exec.write_files) {
        std::filesystem::create_directories(spec.output_dir);
        if (spec.telemetry == TelemetryMode::Full) std::filesystem::create_directories(spec.output_dir / "telemetry");
    }

    const std::size_t total = spec.grid.size() * spec.replicates;
    std::vector<std::optional<ResultRow>> slots(total);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> interrupted{false};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto worker = [&] {
        for (;;) {
            if (failed.load() || (exec.cancel && exec.cancel->load())) {
                if (exec.cancel && exec.cancel->load()) interrupted = true;
                return;
            }
            const std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            try {
                bool cancelled = false;
                ResultRow row = execute_run(spec, i / spec.replicates, i % spec.replicates, exec.cancel, &cancelled,
                                            exec.write_files);
                if (cancelled) {
                    interrupted = true;
                    return;
                }
                slots[i] = std::move(row);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
                return;
            }
        }
    };

    const unsigned jobs = std::max(1u, std::min<unsigned>(exec.jobs, static_cast<unsigned>(std::max<std::size_t>(total, 1))));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(jobs);
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    ExperimentResult result;
    result.interrupted = interrupted.load();
    for (auto& s : slots)
        if (s) result.rows.push_back(std::move(*s));
    result.summary = summarize_rows(result.rows);
    if (exec.write_files) {
        write_results(spec.output_dir / "results.csv", result.rows);
        write_summary(spec.output_dir / "summary.json", result.summary);
    }
    return result;
}

}  // namespace coea::experiment

#endif  // COEA_EXPERIMENT_HPP
