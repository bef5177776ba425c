#ifndef COEA_STATE_HPP
#define COEA_STATE_HPP

#include <cstddef>
#include <cstdint>
#include <cstdlib>

#include "bitstring.hpp"

namespace coea {

enum class Parity { Even, Odd };

constexpr Parity parity_of(std::uint64_t t) noexcept { return (t % 2 == 0) ? Parity::Even : Parity::Odd; }

/// One-count view of a search point at iteration t.
struct Snapshot {
    std::uint64_t t = 0;
    std::int64_t X = 0;
    std::int64_t Y = 0;

    [[nodiscard]] std::int64_t D() const noexcept { return std::llabs(X - Y); }
    [[nodiscard]] std::int64_t H(std::int64_t n) const noexcept { return 2 * n - X - Y; }
};

/**
 * Current CoEA search point.
 *
 * `t` is the index of the next iteration to execute, starting at 1, so the
 * parity of `t` says which side the next step updates (even: x, odd: y).
 */
struct PairState {
    Bitstring x;
    Bitstring y;
    std::uint64_t t = 1;
    std::uint64_t evals = 0;

    [[nodiscard]] std::int64_t X() const noexcept { return static_cast<std::int64_t>(x.onecount()); }
    [[nodiscard]] std::int64_t Y() const noexcept { return static_cast<std::int64_t>(y.onecount()); }
    [[nodiscard]] std::int64_t D() const noexcept { return std::llabs(X() - Y()); }
    [[nodiscard]] std::int64_t H() const noexcept {
        return 2 * static_cast<std::int64_t>(x.size()) - X() - Y();
    }
    [[nodiscard]] Snapshot snapshot() const noexcept { return {t, X(), Y()}; }
};

}  // namespace coea

#endif  // COEA_STATE_HPP
