#ifndef COEA_ORACLE_REPORT_HPP
#define COEA_ORACLE_REPORT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "csv.hpp"
#include "errors.hpp"
#include "oracles.hpp"

namespace coea::oracles {

/// Cartesian grid of tail and MGF checks. Any empty list empties the grid.
struct OracleGrid {
    std::vector<std::size_t> n;
    std::vector<double> parent_fractions;  // parent one-count s = floor(fraction * n)
    std::vector<double> chi;
    std::vector<std::uint64_t> lambda;
    std::vector<std::int64_t> thresholds;
    std::vector<double> eta;
};

inline OracleGrid parse_oracle_grid(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("oracle grid: expected a JSON object");
    OracleGrid g;
    try {
        g.n = j.value("n", g.n);
        g.parent_fractions = j.value("parent_fractions", g.parent_fractions);
        g.chi = j.value("chi", g.chi);
        g.lambda = j.value("lambda", g.lambda);
        g.thresholds = j.value("thresholds", g.thresholds);
        g.eta = j.value("eta", g.eta);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("oracle grid: malformed field: ") + e.what());
    }
    for (auto l : g.lambda)
        if (l < 3) throw ConfigError("oracle grid: lambda must be at least 3 (ln ln lambda must be positive)");
    for (auto f : g.parent_fractions)
        if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("oracle grid: parent fractions must lie in [0, 1]");
    for (auto t : g.thresholds)
        if (t < 0) throw ConfigError("oracle grid: thresholds must be non-negative");
    for (auto e : g.eta)
        if (!(e > 0.0)) throw ConfigError("oracle grid: eta must be positive");
    for (auto c : g.chi)
        for (auto n : g.n)
            if (!(c > 0.0 && c < static_cast<double>(n))) throw ConfigError("oracle grid: chi must lie in (0, n)");
    return g;
}

enum class CheckKind { Mgf, Tail };

struct OracleRow {
    CheckKind kind = CheckKind::Tail;
    std::size_t n = 0;
    std::size_t s_parent = 0;
    double chi = 0.0;
    std::optional<std::uint64_t> lambda;
    std::optional<std::int64_t> threshold;
    std::optional<double> eta;
    double exact = 0.0;
    double bound1 = 0.0;
    BoundStatus status1 = BoundStatus::NotApplicable;
    std::optional<double> bound2;
    BoundStatus status2 = BoundStatus::NotApplicable;

    [[nodiscard]] bool failed() const noexcept {
        return status1 == BoundStatus::Fails || status2 == BoundStatus::Fails;
    }
};

inline std::vector<OracleRow> evaluate_grid(const OracleGrid& g) {
    std::vector<OracleRow> rows;
    for (auto n : g.n) {
        for (auto frac : g.parent_fractions) {
            const auto s = static_cast<std::size_t>(frac * static_cast<double>(n));
            for (auto chi : g.chi) {
                const JumpPmf pmf = jump_pmf(n, s, chi);
                for (auto eta : g.eta) {
                    const MgfCheck m = mgf_bound_check(pmf, eta);
                    OracleRow r;
                    r.kind = CheckKind::Mgf;
                    r.n = n;
                    r.s_parent = s;
                    r.chi = chi;
                    r.eta = eta;
                    r.exact = m.exact;
                    r.bound1 = m.bound;
                    r.status1 = m.holds ? BoundStatus::Holds : BoundStatus::Fails;
                    rows.push_back(r);
                }
                for (auto lambda : g.lambda) {
                    for (auto th : g.thresholds) {
                        const TailCheck t = tail_bound_check(pmf, th, lambda);
                        OracleRow r;
                        r.kind = CheckKind::Tail;
                        r.n = n;
                        r.s_parent = s;
                        r.chi = chi;
                        r.lambda = lambda;
                        r.threshold = th;
                        r.exact = t.exact;
                        r.bound1 = t.bound1;
                        r.status1 = t.status1;
                        if (t.status2 != BoundStatus::NotApplicable) r.bound2 = t.bound2;
                        r.status2 = t.status2;
                        rows.push_back(r);
                    }
                }
            }
        }
    }
    return rows;
}

inline constexpr const char* kOracleHeader = "kind,n,s_parent,chi,lambda,threshold,eta,exact,bound1,status1,bound2,status2";

inline void write_oracle_report(std::ostream& os, const std::vector<OracleRow>& rows) {
    os << kOracleHeader << '\n';
    for (const auto& r : rows) {
        os << (r.kind == CheckKind::Mgf ? "mgf" : "tail") << ',' << r.n << ',' << r.s_parent << ','
           << csv::format_double(r.chi) << ',' << (r.lambda ? std::to_string(*r.lambda) : "") << ','
           << (r.threshold ? std::to_string(*r.threshold) : "") << ','
           << (r.eta ? csv::format_double(*r.eta) : "") << ',' << csv::format_double(r.exact) << ','
           << csv::format_double(r.bound1) << ',' << to_string(r.status1) << ','
           << (r.bound2 ? csv::format_double(*r.bound2) : "") << ',' << csv::quote(to_string(r.status2)) << '\n';
    }
}

struct OracleRunResult {
    std::vector<OracleRow> rows;
    std::size_t failures = 0;
};

/// Evaluates the grid in `grid_path` and writes the report CSV.
inline OracleRunResult run_oracles(const std::filesystem::path& grid_path, const std::filesystem::path& report_path) {
    std::ifstream in(grid_path);
    if (!in) throw ConfigError("cannot open oracle grid " + grid_path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("cannot parse oracle grid: " + std::string(e.what()));
    }
    OracleRunResult res;
    res.rows = evaluate_grid(parse_oracle_grid(j));
    for (const auto& r : res.rows)
        if (r.failed()) ++res.failures;
    if (report_path.has_parent_path()) std::filesystem::create_directories(report_path.parent_path());
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + report_path.string());
    write_oracle_report(out, res.rows);
    return res;
}

}  // namespace coea::oracles

#endif  // COEA_ORACLE_REPORT_HPP
