#ifndef COEA_RNG_HPP
#define COEA_RNG_HPP

#include <cstdint>
#include <random>

namespace coea {

/// SplitMix64 finalizer. Used only to decorrelate (seed, stream) pairs before
/// they reach the engine.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Order-sensitive combination of two 64-bit values.
constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
    return splitmix64(a ^ splitmix64(b + 0x632BE59BD9B4E019ULL));
}

/**
 * Exclusive random stream identified by (seed, stream_id).
 *
 * Two handles built from the same pair produce the same draws for the same
 * call sequence. Handles are move-only so a stream cannot be silently forked
 * by copying it into a worker.
 */
class RngHandle {
public:
    using engine_type = std::mt19937_64;

    RngHandle(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id) {
        const std::uint64_t mixed = hash_combine(seed, stream_id);
        std::seed_seq seq{static_cast<std::uint32_t>(mixed),
                          static_cast<std::uint32_t>(mixed >> 32),
                          static_cast<std::uint32_t>(stream_id),
                          static_cast<std::uint32_t>(stream_id >> 32)};
        engine_.seed(seq);
    }

    RngHandle(const RngHandle&) = delete;
    RngHandle& operator=(const RngHandle&) = delete;
    RngHandle(RngHandle&&) noexcept = default;
    RngHandle& operator=(RngHandle&&) noexcept = default;

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

    engine_type& engine() noexcept { return engine_; }

    /// Uniform integer in [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
    }

    /// Uniform real in [0, 1).
    double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    bool bernoulli(double p) { return uniform01() < p; }

    std::int64_t binomial(std::int64_t trials, double p) {
        if (trials <= 0 || p <= 0.0) return 0;
        if (p >= 1.0) return trials;
        return std::binomial_distribution<std::int64_t>(trials, p)(engine_);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    engine_type engine_;
};

}  // namespace coea

#endif  // COEA_RNG_HPP
