#ifndef COEA_BITSTRING_HPP
#define COEA_BITSTRING_HPP

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace coea {

/**
 * Fixed-length bit vector packed into 64-bit words with a cached popcount.
 *
 * Every mutating member keeps `onecount()` equal to the number of set bits;
 * `recount()` recomputes it from the words for verification.
 */
class Bitstring {
public:
    Bitstring() = default;

    explicit Bitstring(std::size_t n) : n_(n), words_((n + 63) / 64, 0ULL) {}

    static Bitstring all_ones(std::size_t n) {
        Bitstring b(n);
        std::fill(b.words_.begin(), b.words_.end(), ~0ULL);
        b.mask_tail();
        b.ones_ = n;
        return b;
    }

    /// Leading `k` bits set, the rest clear.
    static Bitstring with_ones(std::size_t n, std::size_t k) {
        if (k > n) throw ConfigError("Bitstring::with_ones: k exceeds length");
        Bitstring b(n);
        for (std::size_t i = 0; i < k; ++i) b.words_[i >> 6] |= 1ULL << (i & 63);
        b.ones_ = k;
        return b;
    }

    static Bitstring uniform(std::size_t n, RngHandle& rng) {
        Bitstring b(n);
        for (auto& w : b.words_) w = rng.engine()();
        b.mask_tail();
        b.ones_ = b.recount();
        return b;
    }

    /// Parses a string of '0'/'1' characters, leftmost character is bit 0.
    static Bitstring from_string(std::string_view s) {
        Bitstring b(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1') {
                b.set(i, true);
            } else if (s[i] != '0') {
                throw ConfigError("Bitstring::from_string: invalid character");
            }
        }
        return b;
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t onecount() const noexcept { return ones_; }

    [[nodiscard]] bool get(std::size_t i) const noexcept {
        return (words_[i >> 6] >> (i & 63)) & 1ULL;
    }

    void set(std::size_t i, bool v) noexcept {
        if (get(i) != v) flip(i);
    }

    void flip(std::size_t i) noexcept {
        const std::uint64_t mask = 1ULL << (i & 63);
        std::uint64_t& w = words_[i >> 6];
        w ^= mask;
        if (w & mask) {
            ++ones_;
        } else {
            --ones_;
        }
    }

    void flip_all(std::span<const std::uint32_t> positions) noexcept {
        for (auto p : positions) flip(p);
    }

    /// Fresh popcount over the packed words.
    [[nodiscard]] std::size_t recount() const noexcept {
        std::size_t acc = 0;
        for (auto w : words_) acc += static_cast<std::size_t>(std::popcount(w));
        return acc;
    }

    [[nodiscard]] std::span<const std::uint64_t> words() const noexcept { return words_; }

    [[nodiscard]] std::string to_string() const {
        std::string s(n_, '0');
        for (std::size_t i = 0; i < n_; ++i)
            if (get(i)) s[i] = '1';
        return s;
    }

    /// Concatenation `left || right`; used for the EA's 2n-bit genome.
    static Bitstring concat(const Bitstring& left, const Bitstring& right) {
        Bitstring b(left.size() + right.size());
        for (std::size_t i = 0; i < left.size(); ++i)
            if (left.get(i)) b.set(i, true);
        for (std::size_t i = 0; i < right.size(); ++i)
            if (right.get(i)) b.set(left.size() + i, true);
        return b;
    }

    /// Bits [from, from+len) as a new bitstring.
    [[nodiscard]] Bitstring slice(std::size_t from, std::size_t len) const {
        if (from + len > n_) throw ConfigError("Bitstring::slice: range out of bounds");
        Bitstring b(len);
        for (std::size_t i = 0; i < len; ++i)
            if (get(from + i)) b.set(i, true);
        return b;
    }

    /// Set bits in [from, from+len).
    [[nodiscard]] std::size_t count_range(std::size_t from, std::size_t len) const noexcept {
        std::size_t acc = 0;
        for (std::size_t i = from; i < from + len; ++i) acc += get(i) ? 1 : 0;
        return acc;
    }

    friend bool operator==(const Bitstring& a, const Bitstring& b) noexcept {
        return a.n_ == b.n_ && a.words_ == b.words_;
    }

private:
    void mask_tail() noexcept {
        const std::size_t rem = n_ & 63;
        if (rem != 0 && !words_.empty()) words_.back() &= (1ULL << rem) - 1ULL;
    }

    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
    std::size_t ones_ = 0;
};

inline std::size_t onecount(const Bitstring& b) noexcept { return b.onecount(); }

/// Standard bit-wise mutation: each of `n` bits flips with probability chi/n.
struct MutationParams {
    double chi = 1.0;
    std::size_t n = 1;

    [[nodiscard]] double rate() const noexcept { return chi / static_cast<double>(n); }

    void validate() const {
        if (n == 0) throw ConfigError("MutationParams: n must be positive");
        if (!(chi > 0.0) || !(chi < static_cast<double>(n)))
            throw ConfigError("MutationParams: chi must lie in (0, n)");
    }
};

/**
 * Samples the set of flipped positions for one bit-wise mutation.
 *
 * Draws K ~ Bin(n, rate) and then K distinct positions uniformly (Floyd's
 * subset algorithm), which has the same law as n independent Bernoulli flips
 * but costs O(K) instead of O(n).
 */
class FlipSampler {
public:
    explicit FlipSampler(std::size_t n = 0) : marks_(n, 0) {}

    /// Appends the flipped positions to `out`; returns how many were appended.
    std::size_t sample(std::size_t n, double rate, RngHandle& rng,
                       std::vector<std::uint32_t>& out) {
        const auto k = static_cast<std::size_t>(rng.binomial(static_cast<std::int64_t>(n), rate));
        if (k == 0) return 0;
        if (marks_.size() < n) marks_.assign(n, 0);
        const std::size_t first = out.size();
        for (std::size_t j = n - k; j < n; ++j) {
            auto pos = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(j)));
            if (marks_[pos]) pos = j;
            marks_[pos] = 1;
            out.push_back(static_cast<std::uint32_t>(pos));
        }
        for (std::size_t i = first; i < out.size(); ++i) marks_[out[i]] = 0;
        return k;
    }

private:
    std::vector<std::uint8_t> marks_;
};

/// Offspring of `parent` under bit-wise mutation; the parent is not modified.
inline Bitstring mutate(const Bitstring& parent, const MutationParams& p, RngHandle& rng) {
    p.validate();
    if (parent.size() != p.n) throw ConfigError("mutate: parent length differs from MutationParams::n");
    FlipSampler sampler(p.n);
    std::vector<std::uint32_t> flips;
    sampler.sample(p.n, p.rate(), rng, flips);
    Bitstring child = parent;
    child.flip_all(flips);
    return child;
}

/**
 * Change in one-count of a single mutated offspring, sampled without
 * materializing bits: Bin(n - s, chi/n) - Bin(s, chi/n).
 */
inline std::int64_t jump(std::int64_t parent_ones, const MutationParams& p, RngHandle& rng) {
    p.validate();
    const auto n = static_cast<std::int64_t>(p.n);
    if (parent_ones < 0 || parent_ones > n) throw ConfigError("jump: parent_ones outside [0, n]");
    const double q = p.rate();
    const std::int64_t gained = rng.binomial(n - parent_ones, q);
    const std::int64_t lost = rng.binomial(parent_ones, q);
    return gained - lost;
}

}  // namespace coea

#endif  // COEA_BITSTRING_HPP
