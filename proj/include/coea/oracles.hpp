#ifndef COEA_ORACLES_HPP
#define COEA_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "algorithms.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "state.hpp"
#include "telemetry.hpp"

namespace coea::oracles {

/// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Pr(Bin(n, p) is even) = 1/2 + (1 - 2p)^n / 2.
inline double prob_even(std::uint64_t n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("prob_even: p must lie in [0, 1]");
    return 0.5 + 0.5 * std::pow(1.0 - 2.0 * p, static_cast<double>(n));
}

/// Exact Bin(n, p) pmf over 0..n from log-factorials.
inline std::vector<double> binomial_pmf(std::size_t n, double p) {
    std::vector<double> pmf(n + 1, 0.0);
    if (p <= 0.0) {
        pmf[0] = 1.0;
        return pmf;
    }
    if (p >= 1.0) {
        pmf[n] = 1.0;
        return pmf;
    }
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    const double lnf = std::lgamma(static_cast<double>(n) + 1.0);
    for (std::size_t k = 0; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double lc = lnf - std::lgamma(kd + 1.0) - std::lgamma(static_cast<double>(n - k) + 1.0);
        pmf[k] = std::exp(lc + kd * lp + static_cast<double>(n - k) * lq);
    }
    return pmf;
}

/// Law of U = V1 - V2 with V1 ~ Bin(n - s, chi/n), V2 ~ Bin(s, chi/n) independent.
struct JumpPmf {
    std::size_t n = 0;
    std::size_t s = 0;
    double chi = 0.0;
    std::vector<double> pmf;  // pmf[k + s] = Pr(U = k), k in [-s, n - s]

    [[nodiscard]] std::int64_t min_jump() const noexcept { return -static_cast<std::int64_t>(s); }
    [[nodiscard]] std::int64_t max_jump() const noexcept { return static_cast<std::int64_t>(n - s); }

    [[nodiscard]] double at(std::int64_t k) const noexcept {
        if (k < min_jump() || k > max_jump()) return 0.0;
        return pmf[static_cast<std::size_t>(k - min_jump())];
    }

    /// Pr(U >= k), summed from the far tail inward.
    [[nodiscard]] double tail_ge(std::int64_t k) const noexcept {
        if (k > max_jump()) return 0.0;
        k = std::max(k, min_jump());
        CompensatedSum acc;
        for (std::int64_t j = max_jump(); j >= k; --j) acc.add(at(j));
        return std::min(1.0, acc.value());
    }

    /// Pr(U <= k).
    [[nodiscard]] double cdf_le(std::int64_t k) const noexcept {
        if (k < min_jump()) return 0.0;
        k = std::min(k, max_jump());
        CompensatedSum acc;
        for (std::int64_t j = min_jump(); j <= k; ++j) acc.add(at(j));
        return std::min(1.0, acc.value());
    }

    [[nodiscard]] double total() const noexcept {
        CompensatedSum acc;
        for (double v : pmf) acc.add(v);
        return acc.value();
    }

    [[nodiscard]] double mean() const noexcept {
        CompensatedSum acc;
        for (std::int64_t k = min_jump(); k <= max_jump(); ++k) acc.add(static_cast<double>(k) * at(k));
        return acc.value();
    }
};

inline JumpPmf jump_pmf(std::size_t n, std::size_t s, double chi) {
    if (s > n) throw ConfigError("jump_pmf: s must lie in [0, n]");
    if (!(chi > 0.0) || !(chi < static_cast<double>(n))) throw ConfigError("jump_pmf: chi must lie in (0, n)");
    const double p = chi / static_cast<double>(n);
    const auto gain = binomial_pmf(n - s, p);
    const auto loss = binomial_pmf(s, p);
    JumpPmf out{n, s, chi, std::vector<double>(n + 1, 0.0)};
    const auto lo = -static_cast<std::int64_t>(s);
    for (std::int64_t k = lo; k <= static_cast<std::int64_t>(n - s); ++k) {
        CompensatedSum acc;
        for (std::size_t v2 = 0; v2 <= s; ++v2) {
            const std::int64_t v1 = k + static_cast<std::int64_t>(v2);
            if (v1 < 0 || v1 > static_cast<std::int64_t>(n - s)) continue;
            acc.add(gain[static_cast<std::size_t>(v1)] * loss[v2]);
        }
        out.pmf[static_cast<std::size_t>(k - lo)] = acc.value();
    }
    return out;
}

enum class BoundStatus { Holds, Vacuous, Fails, NotApplicable };

inline std::string to_string(BoundStatus s) {
    switch (s) {
        case BoundStatus::Holds: return "holds";
        case BoundStatus::Vacuous: return "vacuous";
        case BoundStatus::Fails: return "fails";
        case BoundStatus::NotApplicable: return "n/a";
    }
    return "n/a";
}

namespace detail {

// Relative slack for rounding in the exact side of a comparison.
inline constexpr double kRelTol = 1e-12;

inline bool le_with_rounding(double exact, double bound) noexcept {
    return exact <= bound * (1.0 + kRelTol) + std::numeric_limits<double>::denorm_min();
}

// A probability bound at or above 1 says nothing.
inline BoundStatus probability_status(double exact, double bound) noexcept {
    if (bound >= 1.0) return BoundStatus::Vacuous;
    return le_with_rounding(exact, bound) ? BoundStatus::Holds : BoundStatus::Fails;
}

}  // namespace detail

struct MgfCheck {
    double exact = 0.0;
    double bound = 0.0;
    bool holds = false;
};

/// Exact E[exp(eta U)] from the convolution pmf against exp(chi (e^eta - 1)).
inline MgfCheck mgf_bound_check(const JumpPmf& pmf, double eta) {
    if (!(eta > 0.0)) throw ConfigError("mgf_bound_check: eta must be positive");
    const double bound = std::exp(pmf.chi * std::expm1(eta));
    CompensatedSum acc;
    for (std::int64_t k = pmf.min_jump(); k <= pmf.max_jump(); ++k) {
        const double p = pmf.at(k);
        if (p > 0.0) acc.add(std::exp(std::log(p) + eta * static_cast<double>(k)));
    }
    const double exact = acc.value();
    if (!std::isfinite(bound) || !std::isfinite(exact))
        throw RangeError("mgf_bound_check: exponential overflows for this eta");
    return {exact, bound, detail::le_with_rounding(exact, bound)};
}

inline MgfCheck mgf_bound_check(std::size_t n, std::size_t s, double chi, double eta) {
    return mgf_bound_check(jump_pmf(n, s, chi), eta);
}

struct TailCheck {
    double exact = 0.0;
    double bound1 = 0.0;
    BoundStatus status1 = BoundStatus::NotApplicable;
    double bound2 = 0.0;
    BoundStatus status2 = BoundStatus::NotApplicable;

    [[nodiscard]] bool any_failure() const noexcept {
        return status1 == BoundStatus::Fails || status2 == BoundStatus::Fails;
    }
};

/// e^{-chi} lambda^chi e^{-s ln ln lambda}
inline double tail_bound_lambda(double chi, double threshold, std::uint64_t lambda) {
    const double l = std::log(static_cast<double>(lambda));
    return std::exp(-chi + chi * l - threshold * std::log(l));
}

/// e^{-chi} e^{-s}, valid for s >= e^2 chi.
inline double tail_bound_large(double chi, double threshold) { return std::exp(-chi - threshold); }

inline bool tail_bound_large_applies(double chi, double threshold) noexcept {
    return threshold >= std::numbers::e * std::numbers::e * chi;
}

inline TailCheck tail_bound_check(const JumpPmf& pmf, std::int64_t threshold, std::uint64_t lambda) {
    if (lambda < 3) throw ConfigError("tail_bound_check: lambda must be at least 3 so that ln ln lambda > 0");
    if (threshold < 0) throw ConfigError("tail_bound_check: threshold must be non-negative");
    TailCheck out;
    out.exact = pmf.tail_ge(threshold);
    const auto s = static_cast<double>(threshold);
    out.bound1 = tail_bound_lambda(pmf.chi, s, lambda);
    out.status1 = detail::probability_status(out.exact, out.bound1);
    if (tail_bound_large_applies(pmf.chi, s)) {
        out.bound2 = tail_bound_large(pmf.chi, s);
        out.status2 = detail::probability_status(out.exact, out.bound2);
    }
    return out;
}

inline TailCheck tail_bound_check(std::size_t n, std::size_t s_parent, double chi, std::int64_t threshold,
                                  std::uint64_t lambda) {
    return tail_bound_check(jump_pmf(n, s_parent, chi), threshold, lambda);
}

/// Smallest jump of the updated side that crosses the diagonal from (X, Y).
/// X < Y: x moves and needs +D. X >= Y: y moves and needs +(D + 1).
inline std::int64_t crossing_jump(std::int64_t X, std::int64_t Y) noexcept {
    return X < Y ? Y - X : X - Y + 1;
}

/**
 * Exact probability that the best of lambda offspring crosses the diagonal:
 * 1 - Pr(U <= jump - 1)^lambda with U the one-count change of the moving side.
 */
inline double crossing_prob_exact(std::size_t n, std::int64_t X, std::int64_t Y, double chi, std::uint64_t lambda) {
    if (X < 0 || Y < 0 || X > static_cast<std::int64_t>(n) || Y > static_cast<std::int64_t>(n))
        throw ConfigError("crossing_prob_exact: one-counts outside [0, n]");
    if (lambda == 0) throw ConfigError("crossing_prob_exact: lambda must be positive");
    const std::int64_t side = X < Y ? X : Y;
    const std::int64_t need = crossing_jump(X, Y);
    if (need > static_cast<std::int64_t>(n) - side) return 0.0;
    const JumpPmf pmf = jump_pmf(n, static_cast<std::size_t>(side), chi);
    const double reach = pmf.tail_ge(need);
    const double log_miss = reach < 0.5 ? std::log1p(-reach) : std::log(pmf.cdf_le(need - 1));
    if (std::isinf(log_miss)) return 1.0;
    return -std::expm1(static_cast<double>(lambda) * log_miss);
}

/// 1 - 2 lambda^{-1/(2 e^chi)}
inline double crossing_lower_bound(double chi, std::uint64_t lambda) {
    return 1.0 - 2.0 * std::pow(static_cast<double>(lambda), -1.0 / (2.0 * std::exp(chi)));
}

/// 9 lambda^{-(1 - chi)/4}
inline double escape_upper_bound(double chi, std::uint64_t lambda) {
    return 9.0 * std::pow(static_cast<double>(lambda), -(1.0 - chi) / 4.0);
}

/// Whether (X, Y) meets the crossing/escape preconditions: in the tube and at
/// least eps * n ones short of the optimum on both sides.
inline bool state_in_scope(std::size_t n, std::int64_t X, std::int64_t Y, const TubeSpec& tube, double eps) {
    const auto nn = static_cast<std::int64_t>(n);
    const double floor = eps * static_cast<double>(n);
    return tube_membership(std::llabs(X - Y), tube) && static_cast<double>(nn - X) >= floor &&
           static_cast<double>(nn - Y) >= floor;
}

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Wilson score interval; z = 2.5758 gives 99 %.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 2.5758293035489004) {
    if (trials == 0) return {0.0, 1.0};
    const double nt = static_cast<double>(trials);
    const double ph = static_cast<double>(successes) / nt;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nt;
    const double centre = (ph + z2 / (2.0 * nt)) / denom;
    const double half = z / denom * std::sqrt(ph * (1.0 - ph) / nt + z2 / (4.0 * nt * nt));
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct StepTrials {
    std::uint64_t trials = 0;
    std::uint64_t crossings = 0;
    std::uint64_t escapes = 0;  // D after the step > c
};

/**
 * Replays one full CoEA selection step from a state with one-counts (X, Y)
 * `trials` times. The updated side is x when X < Y and y otherwise, i.e. the
 * side whose move can cross the diagonal.
 */
inline StepTrials simulate_step_trials(std::size_t n, std::int64_t X, std::int64_t Y, double chi,
                                       std::uint64_t lambda, double c, std::uint64_t trials, RngHandle& rng) {
    if (X < 0 || Y < 0 || X > static_cast<std::int64_t>(n) || Y > static_cast<std::int64_t>(n))
        throw ConfigError("simulate_step_trials: one-counts outside [0, n]");
    const GameSpec g = GameSpec::diagonal(n);
    const PairState start{Bitstring::with_ones(n, static_cast<std::size_t>(X)),
                          Bitstring::with_ones(n, static_cast<std::size_t>(Y)), X < Y ? 2u : 1u, 0};
    CoeaStepper stepper(n, lambda, chi);
    StepTrials out;
    out.trials = trials;
    PairState state = start;
    for (std::uint64_t i = 0; i < trials; ++i) {
        state.x = start.x;
        state.y = start.y;
        state.t = start.t;
        const StepInfo info = stepper.step(state, g, rng);
        if (detect_crossing(info.parent, info.offspring_ones, info.parity)) ++out.crossings;
        if (static_cast<double>(state.D()) > c) ++out.escapes;
    }
    return out;
}

struct EscapeEstimate {
    double estimate = 0.0;
    Interval ci;
    std::uint64_t trials = 0;
};

/// Monte Carlo Pr(D_{t+1} > c) from an in-tube state, with a Wilson 99 % interval.
inline EscapeEstimate escape_prob_mc(std::size_t n, std::int64_t X, std::int64_t Y, double chi, std::uint64_t lambda,
                                     const TubeSpec& spec, std::uint64_t trials, RngHandle& rng) {
    if (trials < 100) throw UsageError("escape_prob_mc: at least 100 trials are required");
    if (!tube_membership(std::llabs(X - Y), spec)) throw UsageError("escape_prob_mc: start state is outside the tube");
    const StepTrials st = simulate_step_trials(n, X, Y, chi, lambda, spec.c, trials, rng);
    return {static_cast<double>(st.escapes) / static_cast<double>(trials), wilson_interval(st.escapes, trials),
            trials};
}

}  // namespace coea::oracles

#endif  // COEA_ORACLES_HPP
