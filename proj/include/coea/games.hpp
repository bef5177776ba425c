#ifndef COEA_GAMES_HPP
#define COEA_GAMES_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bitstring.hpp"
#include "errors.hpp"

namespace coea {

enum class GameKind { Diagonal, GeneralizedBoundary };

/// Maximin optimum expressed through one-counts.
struct Optimum {
    std::size_t x_star_ones = 0;
    std::size_t y_star_ones = 0;
};

/**
 * Binary test-based payoff g(x, y) = 1 iff |y|_1 <= c(|x|_1).
 *
 * DIAGONAL is the identity constraint. Generalized boundary games carry the
 * constraint as an explicit table over [0, n] so that it serializes as an
 * array of n + 1 integers.
 */
class GameSpec {
public:
    static GameSpec diagonal(std::size_t n) {
        if (n == 0) throw ConfigError("GameSpec: n must be positive");
        return GameSpec(GameKind::Diagonal, n, {});
    }

    static GameSpec generalized(std::vector<std::int64_t> constraint) {
        if (constraint.size() < 2)
            throw ConfigError("GameSpec: constraint table needs n + 1 >= 2 entries");
        const std::size_t n = constraint.size() - 1;
        return GameSpec(GameKind::GeneralizedBoundary, n, std::move(constraint));
    }

    [[nodiscard]] GameKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] const std::vector<std::int64_t>& constraint_table() const noexcept { return table_; }

    [[nodiscard]] std::int64_t constraint(std::size_t s) const {
        if (s > n_) throw ConfigError("GameSpec::constraint: argument outside [0, n]");
        return kind_ == GameKind::Diagonal ? static_cast<std::int64_t>(s) : table_[s];
    }

    /// Payoff from one-counts alone; the game depends on nothing else.
    [[nodiscard]] int payoff_ones(std::size_t x_ones, std::size_t y_ones) const {
        return static_cast<std::int64_t>(y_ones) <= constraint(x_ones) ? 1 : 0;
    }

    [[nodiscard]] bool has_unique_optimum() const noexcept { return kind_ == GameKind::Diagonal; }

    [[nodiscard]] Optimum optimum() const {
        if (!has_unique_optimum())
            throw UnsupportedGame("optimum: no closed form for a generalized boundary game");
        return {n_, n_};
    }

private:
    GameSpec(GameKind kind, std::size_t n, std::vector<std::int64_t> table)
        : kind_(kind), n_(n), table_(std::move(table)) {}

    GameKind kind_;
    std::size_t n_;
    std::vector<std::int64_t> table_;
};

inline int payoff(const GameSpec& g, const Bitstring& x, const Bitstring& y) {
    if (x.size() != g.n() || y.size() != g.n())
        throw ConfigError("payoff: bitstring length differs from game size");
    return g.payoff_ones(x.onecount(), y.onecount());
}

/// Distance to the optimum in one-count space: |x*| - |x| + |y*| - |y|.
inline std::size_t optimum_distance(const GameSpec& g, std::size_t x_ones, std::size_t y_ones) {
    const Optimum opt = g.optimum();
    const auto dx = static_cast<std::int64_t>(opt.x_star_ones) - static_cast<std::int64_t>(x_ones);
    const auto dy = static_cast<std::int64_t>(opt.y_star_ones) - static_cast<std::int64_t>(y_ones);
    return static_cast<std::size_t>((dx < 0 ? -dx : dx) + (dy < 0 ? -dy : dy));
}

/// Strict criterion: distance < eps * n.
inline bool is_eps_approx_ones(const GameSpec& g, std::size_t x_ones, std::size_t y_ones, double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw ConfigError("is_eps_approx: eps outside [0, 1]");
    return static_cast<double>(optimum_distance(g, x_ones, y_ones)) < eps * static_cast<double>(g.n());
}

inline bool is_eps_approx(const GameSpec& g, const Bitstring& x, const Bitstring& y, double eps) {
    if (x.size() != g.n() || y.size() != g.n())
        throw ConfigError("is_eps_approx: bitstring length differs from game size");
    return is_eps_approx_ones(g, x.onecount(), y.onecount(), eps);
}

inline std::string to_string(GameKind k) {
    return k == GameKind::Diagonal ? "Diagonal" : "GeneralizedBoundary";
}

}  // namespace coea

#endif  // COEA_GAMES_HPP
