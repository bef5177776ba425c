#ifndef COEA_TELEMETRY_HPP
#define COEA_TELEMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "errors.hpp"
#include "state.hpp"

namespace coea {

/// One row of per-generation telemetry. `t` is the iteration that produced
/// the state (X, Y).
struct GenerationRecord {
    std::uint64_t t = 0;
    std::int64_t X = 0;
    std::int64_t Y = 0;
    std::int64_t D = 0;
    std::int64_t H = 0;
    bool crossed = false;
    bool in_tube = false;
    std::int64_t offspring_max_jump = 0;
    std::uint64_t evals = 0;
    // Parent of this row was a freshly reset state; not part of the CSV schema.
    bool after_restart = false;

    [[nodiscard]] bool consistent(std::int64_t n) const noexcept {
        return D == std::llabs(X - Y) && H == 2 * n - X - Y;
    }
};

inline constexpr const char* kGenerationCsvHeader = "t,X,Y,D,H,crossed,in_tube,max_jump,evals";

inline void write_csv_row(std::ostream& os, const GenerationRecord& r) {
    os << r.t << ',' << r.X << ',' << r.Y << ',' << r.D << ',' << r.H << ',' << (r.crossed ? 1 : 0) << ','
       << (r.in_tube ? 1 : 0) << ',' << r.offspring_max_jump << ',' << r.evals << '\n';
}

inline void write_csv(std::ostream& os, std::span<const GenerationRecord> records) {
    os << kGenerationCsvHeader << '\n';
    for (const auto& r : records) write_csv_row(os, r);
}

/// Band |X - Y| < c around the diagonal, c = kappa * ln(lambda) / ln(ln(lambda)).
struct TubeSpec {
    double kappa = 0.0;
    std::uint64_t lambda = 3;
    double c = 0.0;

    static TubeSpec make(double kappa, std::uint64_t lambda) {
        if (lambda < 3) throw ConfigError("TubeSpec: lambda must be at least 3 so that ln ln lambda > 0");
        if (!(kappa > 0.0)) throw ConfigError("TubeSpec: kappa must be positive");
        const double l = std::log(static_cast<double>(lambda));
        return {kappa, lambda, kappa * l / std::log(l)};
    }

    /// kappa = (1 + 3 chi) / 4, which sits inside (chi, (1 + chi) / 2) for chi in (0, 1).
    static double default_kappa(double chi) noexcept { return (1.0 + 3.0 * chi) / 4.0; }

    static TubeSpec for_chi(double chi, std::uint64_t lambda) { return make(default_kappa(chi), lambda); }
};

inline bool tube_membership(std::int64_t D, const TubeSpec& spec) noexcept {
    return static_cast<double>(D) < spec.c;
}

/**
 * Whether the offspring of the side updated at this iteration cross the
 * diagonal: horizontally (even, Y > X, some child has ones >= Y) or
 * vertically (odd, X >= Y, some child has ones > X).
 */
inline bool detect_crossing(const Snapshot& parent, std::span<const std::int64_t> offspring_ones, Parity parity) {
    if (parity == Parity::Even) {
        if (!(parent.Y > parent.X)) return false;
        return std::any_of(offspring_ones.begin(), offspring_ones.end(),
                           [&](std::int64_t ones) { return ones >= parent.Y; });
    }
    if (!(parent.X >= parent.Y)) return false;
    return std::any_of(offspring_ones.begin(), offspring_ones.end(),
                       [&](std::int64_t ones) { return ones > parent.X; });
}

inline bool detect_crossing(const PairState& parent, std::span<const std::int64_t> offspring_ones, Parity parity) {
    return detect_crossing(parent.snapshot(), offspring_ones, parity);
}

namespace detail {

// Y strictly above the diagonal and inside the tube: X < Y < X + c.
inline bool above_in_tube(const Snapshot& s, double c) noexcept {
    return static_cast<double>(s.X) + c > static_cast<double>(s.Y) && s.Y > s.X;
}

// On or below the diagonal and inside the tube: Y <= X < Y + c.
inline bool below_in_tube(const Snapshot& s, double c) noexcept {
    return static_cast<double>(s.Y) + c > static_cast<double>(s.X) && s.X >= s.Y;
}

// First link of a cycle anchored at s.
inline bool cycle_start(const Snapshot& s, double c) noexcept {
    return parity_of(s.t) == Parity::Even ? above_in_tube(s, c) : below_in_tube(s, c);
}

}  // namespace detail

/**
 * Successful cycle anchored at window[0].t.
 *
 * Even anchor: X+c > Y > X, then Y+c > X >= Y, then X+c > Y > X.
 * Odd anchor uses the mirrored chain: Y+c > X >= Y, X+c > Y > X, Y+c > X >= Y.
 */
inline bool detect_successful_cycle(std::span<const Snapshot, 3> window, double c) {
    if (window[1].t != window[0].t + 1 || window[2].t != window[1].t + 1)
        throw UsageError("detect_successful_cycle: window states are not consecutive iterations");
    if (parity_of(window[0].t) == Parity::Even) {
        return detail::above_in_tube(window[0], c) && detail::below_in_tube(window[1], c) &&
               detail::above_in_tube(window[2], c);
    }
    return detail::below_in_tube(window[0], c) && detail::above_in_tube(window[1], c) &&
           detail::below_in_tube(window[2], c);
}

struct CrossingStats {
    std::uint64_t crossings = 0;
    std::uint64_t cycles_attempted = 0;
    std::uint64_t cycles_successful = 0;
    std::uint64_t escapes = 0;
    // Offspring whose jump reaches D + c (K) and D (M), summed over crossing-eligible steps.
    std::uint64_t K_total = 0;
    std::uint64_t M_total = 0;

    CrossingStats& operator+=(const CrossingStats& o) noexcept {
        crossings += o.crossings;
        cycles_attempted += o.cycles_attempted;
        cycles_successful += o.cycles_successful;
        escapes += o.escapes;
        K_total += o.K_total;
        M_total += o.M_total;
        return *this;
    }

    friend bool operator==(const CrossingStats&, const CrossingStats&) = default;
};

enum class TelemetryMode { Off, Summary, Full };

/**
 * Per-run accumulator fed by the run loop once per generation.
 *
 * Keeps CrossingStats unless the mode is Off, and additionally buffers and
 * forwards every GenerationRecord in Full mode.
 */
class RunTelemetry {
public:
    using Sink = std::function<void(const GenerationRecord&)>;

    RunTelemetry(std::int64_t n, std::optional<TubeSpec> tube, TelemetryMode mode = TelemetryMode::Summary,
                 Sink sink = {})
        : n_(n), tube_(tube), mode_(mode), sink_(std::move(sink)) {}

    [[nodiscard]] TelemetryMode mode() const noexcept { return mode_; }
    [[nodiscard]] const CrossingStats& stats() const noexcept { return stats_; }
    [[nodiscard]] const std::optional<TubeSpec>& tube() const noexcept { return tube_; }
    [[nodiscard]] std::uint64_t records_emitted() const noexcept { return emitted_; }

    /// Full mode keeps every record in memory unless buffering is switched off.
    void set_buffering(bool on) noexcept { buffering_ = on; }

    /// Starts (or restarts) the cycle window at the given state.
    void begin(const Snapshot& s) {
        window_size_ = 0;
        push_window(s);
    }

    void mark_restart(const Snapshot& s) {
        pending_restart_ = true;
        begin(s);
    }

    /// `offspring_ones` holds the one-counts of the children of the side updated
    /// by `parity`; `child` is the selected state.
    void on_generation(const Snapshot& parent, Parity parity, std::span<const std::int64_t> offspring_ones,
                       const Snapshot& child, std::uint64_t evals) {
        if (mode_ == TelemetryMode::Off) {
            pending_restart_ = false;
            return;
        }
        GenerationRecord rec;
        rec.t = parent.t;
        rec.X = child.X;
        rec.Y = child.Y;
        rec.D = child.D();
        rec.H = child.H(n_);
        rec.crossed = detect_crossing(parent, offspring_ones, parity);
        rec.in_tube = tube_ && tube_membership(rec.D, *tube_);
        rec.evals = evals;
        rec.after_restart = pending_restart_;
        pending_restart_ = false;

        const std::int64_t parent_side = parity == Parity::Even ? parent.X : parent.Y;
        std::int64_t max_ones = std::numeric_limits<std::int64_t>::min();
        for (auto o : offspring_ones) max_ones = std::max(max_ones, o);
        rec.offspring_max_jump = offspring_ones.empty() ? 0 : max_ones - parent_side;

        if (rec.crossed) ++stats_.crossings;
        if (tube_) {
            const double c = tube_->c;
            const std::int64_t d = parent.D();
            const bool parent_in = tube_membership(d, *tube_);
            if (parent_in && static_cast<double>(rec.D) > c) ++stats_.escapes;
            const bool eligible = parity == Parity::Even ? parent.Y > parent.X : parent.X >= parent.Y;
            if (eligible && parent_in) {
                for (auto o : offspring_ones) {
                    const auto delta = static_cast<double>(o - parent_side);
                    if (delta >= static_cast<double>(d)) ++stats_.M_total;
                    if (delta >= static_cast<double>(d) + c) ++stats_.K_total;
                }
            }
            push_window(child);
        }

        ++emitted_;
        if (mode_ == TelemetryMode::Full) {
            if (buffering_) records_.push_back(rec);
            if (sink_) sink_(rec);
        }
    }

    [[nodiscard]] const std::vector<GenerationRecord>& records() const noexcept { return records_; }

private:
    void push_window(const Snapshot& s) {
        if (window_size_ == 3) {
            window_[0] = window_[1];
            window_[1] = window_[2];
            window_size_ = 2;
        }
        window_[window_size_++] = s;
        if (window_size_ == 3 && tube_) {
            const double c = tube_->c;
            if (detail::cycle_start(window_[0], c)) {
                ++stats_.cycles_attempted;
                if (detect_successful_cycle(std::span<const Snapshot, 3>(window_), c)) ++stats_.cycles_successful;
            }
        }
    }

    std::int64_t n_;
    std::optional<TubeSpec> tube_;
    TelemetryMode mode_;
    Sink sink_;
    CrossingStats stats_;
    std::vector<GenerationRecord> records_;
    std::array<Snapshot, 3> window_{};
    std::size_t window_size_ = 0;
    bool pending_restart_ = false;
    bool buffering_ = true;
    std::uint64_t emitted_ = 0;
};

struct DriftEstimate {
    double mean = 0.0;
    std::size_t count = 0;
    double standard_error = 0.0;
};

/**
 * Sample mean of H_t - H_{t+1} over consecutive record pairs whose source
 * record satisfies `predicate`. Pairs that straddle a restart are skipped.
 * Returns nullopt when no transition qualifies.
 */
template <class Predicate>
std::optional<DriftEstimate> drift_estimate(std::span<const GenerationRecord> records, Predicate&& predicate) {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i + 1 < records.size(); ++i) {
        const auto& from = records[i];
        const auto& to = records[i + 1];
        if (to.after_restart || to.t != from.t + 1) continue;
        if (!predicate(from)) continue;
        const auto delta = static_cast<double>(from.H - to.H);
        ++count;
        const double d = delta - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (delta - mean);
    }
    if (count == 0) return std::nullopt;
    const double se = count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count))
                                : std::numeric_limits<double>::quiet_NaN();
    return DriftEstimate{mean, count, se};
}

}  // namespace coea

#endif  // COEA_TELEMETRY_HPP
