#ifndef COEA_ALGORITHMS_HPP
#define COEA_ALGORITHMS_HPP

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bitstring.hpp"
#include "errors.hpp"
#include "games.hpp"
#include "rng.hpp"
#include "state.hpp"
#include "telemetry.hpp"

namespace coea {

enum class Algorithm { EA, CoEA };

inline std::string to_string(Algorithm a) { return a == Algorithm::EA ? "EA" : "CoEA"; }

enum class InitKind { UniformRandom, AllZeros, Fixed };

struct InitSpec {
    InitKind kind = InitKind::UniformRandom;
    std::size_t x_ones = 0;  // Fixed only
    std::size_t y_ones = 0;  // Fixed only

    static InitSpec uniform() { return {InitKind::UniformRandom, 0, 0}; }
    static InitSpec zeros() { return {InitKind::AllZeros, 0, 0}; }
    static InitSpec fixed(std::size_t x, std::size_t y) { return {InitKind::Fixed, x, y}; }
};

struct RunConfig {
    std::size_t n = 100;
    std::size_t lambda = 100;
    double chi = 0.6;
    InitSpec init = InitSpec::uniform();
    double eps = 0.01;
    std::uint64_t budget = 10'000'000;
    std::optional<std::uint64_t> restart_period;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    void validate() const {
        if (n == 0) throw ConfigError("RunConfig: n must be positive");
        if (lambda < 1) throw ConfigError("RunConfig: lambda must be at least 1");
        if (budget < lambda) throw ConfigError("RunConfig: budget must be at least lambda");
        if (!(chi > 0.0) || !(chi < static_cast<double>(n))) throw ConfigError("RunConfig: chi must lie in (0, n)");
        if (!(eps >= 0.0 && eps <= 1.0)) throw ConfigError("RunConfig: eps must lie in [0, 1]");
        if (restart_period && (*restart_period < 2 || *restart_period % 2 != 0))
            throw ConfigError("RunConfig: restart_period must be even and at least 2");
        if (init.kind == InitKind::Fixed && (init.x_ones > n || init.y_ones > n))
            throw ConfigError("RunConfig: fixed initialization exceeds n");
    }

    [[nodiscard]] MutationParams mutation() const { return {chi, n}; }
};

/// Number of generations between restarts: 2 * ceil(4 (2 - delta) n).
inline std::uint64_t default_restart_period(std::size_t n, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("default_restart_period: delta must lie in (0, 1)");
    const double tc = std::ceil(4.0 * (2.0 - delta) * static_cast<double>(n) - 1e-9);
    return 2 * static_cast<std::uint64_t>(tc);
}

struct RunOutcome {
    bool hit = false;
    std::optional<std::uint64_t> hitting_evals;
    std::uint64_t generations = 0;
    std::uint64_t restarts = 0;
    std::uint64_t evals = 0;
    bool cancelled = false;
    Snapshot final_state;
    CrossingStats stats;
};

/**
 * Bin(n, p) sampler by table inversion for the fixed (n, p) of a run.
 * Falls back to std::binomial_distribution when the table would underflow.
 */
class BinomialSampler {
public:
    BinomialSampler(std::size_t n, double p) : n_(n), p_(p) {
        if (p <= 0.0 || n == 0) {
            cdf_ = {1.0};
            return;
        }
        const double mean = static_cast<double>(n) * p;
        const double p0 = std::pow(1.0 - p, static_cast<double>(n));
        if (p >= 1.0 || mean > 64.0 || !(p0 > 1e-250)) return;
        double pmf = p0;
        double acc = 0.0;
        const double ratio = p / (1.0 - p);
        for (std::size_t k = 0; k <= n; ++k) {
            acc += pmf;
            cdf_.push_back(acc);
            if (1.0 - acc < 1e-17 && static_cast<double>(k) > mean) break;
            pmf *= static_cast<double>(n - k) / static_cast<double>(k + 1) * ratio;
        }
        cdf_.back() = 1.0;
    }

    std::size_t operator()(RngHandle& rng) const {
        if (cdf_.empty()) return static_cast<std::size_t>(rng.binomial(static_cast<std::int64_t>(n_), p_));
        const double u = rng.uniform01();
        std::size_t k = 0;
        while (k + 1 < cdf_.size() && u >= cdf_[k]) ++k;
        return k;
    }

private:
    std::size_t n_;
    double p_;
    std::vector<double> cdf_;
};

/// Index of a maximal entry, ties broken uniformly at random.
inline std::size_t select_uniform_among_max(std::span<const int> fitness, RngHandle& rng) {
    assert(!fitness.empty());
    const int best = *std::max_element(fitness.begin(), fitness.end());
    const auto ties = static_cast<std::size_t>(std::count(fitness.begin(), fitness.end(), best));
    std::size_t pick = ties == 1 ? 0 : static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(ties) - 1));
    for (std::size_t i = 0; i < fitness.size(); ++i) {
        if (fitness[i] != best) continue;
        if (pick == 0) return i;
        --pick;
    }
    return fitness.size() - 1;
}

/**
 * Offspring of one parent, stored as flip lists so that only the selected
 * child is ever materialized.
 */
class OffspringBatch {
public:
    OffspringBatch(std::size_t length, double rate)
        : length_(length), rate_(rate), count_(length, rate), marks_(length, 0) {}

    void generate(std::size_t lambda, RngHandle& rng) {
        flips_.clear();
        offsets_.assign(1, 0);
        for (std::size_t i = 0; i < lambda; ++i) {
            const std::size_t k = count_(rng);
            // Floyd's subset sampling; duplicates found by scan for small k, by marks otherwise.
            const bool use_marks = k > kScanLimit;
            const auto first = static_cast<std::ptrdiff_t>(offsets_.back());
            for (std::size_t j = length_ - k; j < length_; ++j) {
                auto pos = static_cast<std::uint32_t>(rng.uniform_int(0, static_cast<std::int64_t>(j)));
                const bool taken = use_marks ? marks_[pos] != 0
                                             : std::find(flips_.begin() + first, flips_.end(), pos) != flips_.end();
                if (taken) pos = static_cast<std::uint32_t>(j);
                if (use_marks) marks_[pos] = 1;
                flips_.push_back(pos);
            }
            if (use_marks)
                for (auto it = flips_.begin() + first; it != flips_.end(); ++it) marks_[*it] = 0;
            offsets_.push_back(flips_.size());
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return offsets_.size() - 1; }

    [[nodiscard]] std::span<const std::uint32_t> flips(std::size_t i) const noexcept {
        return std::span<const std::uint32_t>(flips_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
    }

    /// Change in one-count of offspring i relative to `parent`, restricted to [from, from+len).
    [[nodiscard]] std::int64_t delta(std::size_t i, const Bitstring& parent, std::size_t from = 0,
                                     std::size_t len = std::numeric_limits<std::size_t>::max()) const noexcept {
        std::int64_t d = 0;
        for (auto p : flips(i)) {
            if (p < from || p - from >= len) continue;
            d += parent.get(p) ? -1 : 1;
        }
        return d;
    }

    [[nodiscard]] double rate() const noexcept { return rate_; }

private:
    static constexpr std::size_t kScanLimit = 32;

    std::size_t length_;
    double rate_;
    BinomialSampler count_;
    std::vector<std::uint8_t> marks_;
    std::vector<std::uint32_t> flips_;
    std::vector<std::size_t> offsets_{0};
};

/// What one generation did; spans stay valid until the next step.
struct StepInfo {
    Parity parity = Parity::Odd;
    Snapshot parent;
    std::span<const std::int64_t> offspring_ones;
    std::span<const int> offspring_fitness;
    std::size_t selected = 0;
};

/**
 * Alternating-update (1, lambda)-CoEA step engine.
 *
 * Even t: lambda mutants of x, keep argmax_i g(x^i, y).
 * Odd t:  lambda mutants of y, keep argmax_i -g(x, y^i).
 * The parent never survives; ties are uniform among maximal children.
 */
class CoeaStepper {
public:
    CoeaStepper(std::size_t n, std::size_t lambda, double chi)
        : n_(n), lambda_(lambda), batch_(n, MutationParams{chi, n}.rate()) {
        MutationParams{chi, n}.validate();
        if (lambda == 0) throw ConfigError("CoeaStepper: lambda must be at least 1");
        ones_.reserve(lambda);
        fitness_.reserve(lambda);
    }

    StepInfo step(PairState& state, const GameSpec& g, RngHandle& rng) {
        if (state.x.size() != n_ || state.y.size() != n_ || g.n() != n_)
            throw ConfigError("CoeaStepper: state or game size differs from n");
        StepInfo info;
        info.parity = parity_of(state.t);
        info.parent = state.snapshot();
        const bool update_x = info.parity == Parity::Even;
        Bitstring& side = update_x ? state.x : state.y;
        const auto side_ones = static_cast<std::int64_t>(side.onecount());
        const auto other_ones = update_x ? state.y.onecount() : state.x.onecount();

        batch_.generate(lambda_, rng);
        ones_.clear();
        fitness_.clear();
        for (std::size_t i = 0; i < lambda_; ++i) {
            const std::int64_t ones = side_ones + batch_.delta(i, side);
            ones_.push_back(ones);
            const auto u = static_cast<std::size_t>(ones);
            fitness_.push_back(update_x ? g.payoff_ones(u, other_ones) : -g.payoff_ones(other_ones, u));
        }
        info.selected = select_uniform_among_max(fitness_, rng);
        assert(fitness_[info.selected] == *std::max_element(fitness_.begin(), fitness_.end()));
        side.flip_all(batch_.flips(info.selected));
        assert(static_cast<std::int64_t>(side.onecount()) == ones_[info.selected]);

        ++state.t;
        state.evals += lambda_;
        info.offspring_ones = ones_;
        info.offspring_fitness = fitness_;
        return info;
    }

    [[nodiscard]] const OffspringBatch& batch() const noexcept { return batch_; }

private:
    std::size_t n_;
    std::size_t lambda_;
    OffspringBatch batch_;
    std::vector<std::int64_t> ones_;
    std::vector<int> fitness_;
};

inline PairState coea_step(const PairState& state, const RunConfig& cfg, const GameSpec& g, RngHandle& rng) {
    CoeaStepper stepper(cfg.n, cfg.lambda, cfg.chi);
    PairState next = state;
    stepper.step(next, g, rng);
    return next;
}

/// (1, lambda)-EA state: the 2n-bit genome z = x || y with cached half counts.
struct EaState {
    Bitstring z;
    std::int64_t X = 0;
    std::int64_t Y = 0;
    std::uint64_t t = 1;
    std::uint64_t evals = 0;

    static EaState from(Bitstring genome) {
        if (genome.size() % 2 != 0) throw ConfigError("EaState: genome length must be even");
        const std::size_t n = genome.size() / 2;
        EaState s;
        s.X = static_cast<std::int64_t>(genome.count_range(0, n));
        s.Y = static_cast<std::int64_t>(genome.count_range(n, n));
        s.z = std::move(genome);
        return s;
    }

    [[nodiscard]] Snapshot snapshot() const noexcept { return {t, X, Y}; }
};

/**
 * (1, lambda)-EA on the concatenated genome with fitness f(z) = g(x, y).
 *
 * Each of the 2n bits flips with probability chi / n, i.e. the per-half rate
 * matches the CoEA's.
 */
class EaStepper {
public:
    EaStepper(std::size_t n, std::size_t lambda, double chi)
        : n_(n), lambda_(lambda), batch_(2 * n, MutationParams{2.0 * chi, 2 * n}.rate()) {
        MutationParams{2.0 * chi, 2 * n}.validate();
        if (lambda == 0) throw ConfigError("EaStepper: lambda must be at least 1");
    }

    StepInfo step(EaState& state, const GameSpec& g, RngHandle& rng) {
        if (state.z.size() != 2 * n_ || g.n() != n_) throw ConfigError("EaStepper: genome or game size differs");
        StepInfo info;
        info.parity = parity_of(state.t);
        info.parent = state.snapshot();
        batch_.generate(lambda_, rng);
        xs_.clear();
        ys_.clear();
        fitness_.clear();
        for (std::size_t i = 0; i < lambda_; ++i) {
            const std::int64_t x = state.X + batch_.delta(i, state.z, 0, n_);
            const std::int64_t y = state.Y + batch_.delta(i, state.z, n_, n_);
            xs_.push_back(x);
            ys_.push_back(y);
            fitness_.push_back(g.payoff_ones(static_cast<std::size_t>(x), static_cast<std::size_t>(y)));
        }
        info.selected = select_uniform_among_max(fitness_, rng);
        state.z.flip_all(batch_.flips(info.selected));
        state.X = xs_[info.selected];
        state.Y = ys_[info.selected];
        ++state.t;
        state.evals += lambda_;
        info.offspring_fitness = fitness_;
        return info;
    }

    [[nodiscard]] const OffspringBatch& batch() const noexcept { return batch_; }

private:
    std::size_t n_;
    std::size_t lambda_;
    OffspringBatch batch_;
    std::vector<std::int64_t> xs_;
    std::vector<std::int64_t> ys_;
    std::vector<int> fitness_;
};

inline Bitstring ea_step(const Bitstring& genome, const RunConfig& cfg, const GameSpec& g, RngHandle& rng) {
    EaStepper stepper(cfg.n, cfg.lambda, cfg.chi);
    EaState s = EaState::from(genome);
    stepper.step(s, g, rng);
    return s.z;
}

namespace detail {

inline Bitstring init_side(const InitSpec& init, std::size_t n, std::size_t fixed_ones, RngHandle& rng) {
    switch (init.kind) {
        case InitKind::UniformRandom:
            return Bitstring::uniform(n, rng);
        case InitKind::AllZeros:
            return Bitstring(n);
        case InitKind::Fixed:
            return Bitstring::with_ones(n, fixed_ones);
    }
    return Bitstring(n);
}

inline std::optional<TubeSpec> default_tube(const RunConfig& cfg) {
    if (cfg.lambda < 3) return std::nullopt;
    return TubeSpec::for_chi(cfg.chi, cfg.lambda);
}

}  // namespace detail

struct RunOptions {
    TelemetryMode telemetry = TelemetryMode::Summary;
    RunTelemetry::Sink sink;
    const std::atomic<bool>* cancel = nullptr;
};

/**
 * Runs one EA or CoEA trajectory until the eps-approximation is hit or the
 * evaluation budget cannot pay for another generation.
 *
 * The initial state is checked before the first generation. With a restart
 * period the pair is reset to all-zeros every `restart_period` generations;
 * the generation counter, the evaluation counter and the random stream carry
 * on across restarts. Games without a unique optimum run to budget.
 */
inline RunOutcome run(Algorithm algorithm, const RunConfig& cfg, const GameSpec& g, RunOptions opts = {},
                      RunTelemetry* telemetry_out = nullptr) {
    cfg.validate();
    if (g.n() != cfg.n) throw ConfigError("run: game size differs from RunConfig::n");

    RngHandle rng(cfg.seed, cfg.stream_id);
    RunTelemetry local(static_cast<std::int64_t>(cfg.n), detail::default_tube(cfg), opts.telemetry, opts.sink);
    RunTelemetry& tel = telemetry_out ? *telemetry_out : local;

    const bool check = g.has_unique_optimum();
    auto is_hit = [&](std::int64_t X, std::int64_t Y) {
        return check && is_eps_approx_ones(g, static_cast<std::size_t>(X), static_cast<std::size_t>(Y), cfg.eps);
    };
    auto cancelled = [&] { return opts.cancel && opts.cancel->load(std::memory_order_relaxed); };

    RunOutcome out;
    Bitstring x0 = detail::init_side(cfg.init, cfg.n, cfg.init.x_ones, rng);
    Bitstring y0 = detail::init_side(cfg.init, cfg.n, cfg.init.y_ones, rng);

    auto finish = [&](const Snapshot& s, std::uint64_t evals) {
        out.final_state = s;
        out.evals = evals;
        out.stats = tel.stats();
        return out;
    };

    if (algorithm == Algorithm::CoEA) {
        PairState state{std::move(x0), std::move(y0), 1, 0};
        CoeaStepper stepper(cfg.n, cfg.lambda, cfg.chi);
        tel.begin(state.snapshot());
        if (is_hit(state.X(), state.Y())) {
            out.hit = true;
            out.hitting_evals = 0;
            return finish(state.snapshot(), 0);
        }
        while (state.evals + cfg.lambda <= cfg.budget) {
            if (cancelled()) {
                out.cancelled = true;
                break;
            }
            const StepInfo info = stepper.step(state, g, rng);
            ++out.generations;
            tel.on_generation(info.parent, info.parity, info.offspring_ones, state.snapshot(), state.evals);
            if (is_hit(state.X(), state.Y())) {
                out.hit = true;
                out.hitting_evals = state.evals;
                break;
            }
            if (cfg.restart_period && out.generations % *cfg.restart_period == 0) {
                state.x = Bitstring(cfg.n);
                state.y = Bitstring(cfg.n);
                ++out.restarts;
                tel.mark_restart(state.snapshot());
            }
        }
        return finish(state.snapshot(), state.evals);
    }

    EaState state = EaState::from(Bitstring::concat(x0, y0));
    EaStepper stepper(cfg.n, cfg.lambda, cfg.chi);
    tel.begin(state.snapshot());
    if (is_hit(state.X, state.Y)) {
        out.hit = true;
        out.hitting_evals = 0;
        return finish(state.snapshot(), 0);
    }
    while (state.evals + cfg.lambda <= cfg.budget) {
        if (cancelled()) {
            out.cancelled = true;
            break;
        }
        const StepInfo info = stepper.step(state, g, rng);
        ++out.generations;
        tel.on_generation(info.parent, info.parity, {}, state.snapshot(), state.evals);
        if (is_hit(state.X, state.Y)) {
            out.hit = true;
            out.hitting_evals = state.evals;
            break;
        }
        if (cfg.restart_period && out.generations % *cfg.restart_period == 0) {
            state = EaState{Bitstring(2 * cfg.n), 0, 0, state.t, state.evals};
            ++out.restarts;
            tel.mark_restart(state.snapshot());
        }
    }
    return finish(state.snapshot(), state.evals);
}

}  // namespace coea

#endif  // COEA_ALGORITHMS_HPP
