#include <algorithm>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "coea/games.hpp"

using namespace coea;

namespace {

Bitstring ones_at_random(std::size_t n, std::size_t k, RngHandle& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng.engine());
    Bitstring b(n);
    for (std::size_t i = 0; i < k; ++i) b.set(idx[i], true);
    return b;
}

}  // namespace

TEST(Payoff, DiagonalExamples) {
    const auto g = GameSpec::diagonal(5);
    EXPECT_EQ(payoff(g, Bitstring::with_ones(5, 3), Bitstring::with_ones(5, 2)), 1);
    EXPECT_EQ(payoff(g, Bitstring(5), Bitstring(5)), 1);
    EXPECT_EQ(payoff(g, Bitstring::with_ones(5, 1), Bitstring::with_ones(5, 2)), 0);
}

TEST(Payoff, LengthMismatchIsConfigError) {
    const auto g = GameSpec::diagonal(5);
    EXPECT_THROW(payoff(g, Bitstring(4), Bitstring(5)), ConfigError);
    EXPECT_THROW(payoff(g, Bitstring(5), Bitstring(6)), ConfigError);
}

TEST(Payoff, GeneralizedUsesTable) {
    const auto g = GameSpec::generalized({0, 0, 1, 3});
    EXPECT_EQ(g.n(), 3u);
    EXPECT_EQ(g.payoff_ones(1, 0), 1);
    EXPECT_EQ(g.payoff_ones(1, 1), 0);
    EXPECT_EQ(g.payoff_ones(3, 3), 1);
    EXPECT_THROW(static_cast<void>(g.constraint(4)), ConfigError);
    EXPECT_THROW(GameSpec::generalized({1}), ConfigError);
}

TEST(Payoff, DiagonalEqualsIdentityTable) {
    const std::size_t n = 12;
    std::vector<std::int64_t> table(n + 1);
    std::iota(table.begin(), table.end(), 0);
    const auto d = GameSpec::diagonal(n);
    const auto t = GameSpec::generalized(table);
    for (std::size_t x = 0; x <= n; ++x)
        for (std::size_t y = 0; y <= n; ++y) EXPECT_EQ(d.payoff_ones(x, y), t.payoff_ones(x, y));
}

TEST(EpsApprox, Examples) {
    const auto g = GameSpec::diagonal(10);
    EXPECT_TRUE(is_eps_approx_ones(g, 9, 10, 0.2));
    EXPECT_FALSE(is_eps_approx_ones(g, 9, 9, 0.2));
    for (std::size_t x = 0; x <= 10; ++x)
        for (std::size_t y = 0; y <= 10; ++y) EXPECT_FALSE(is_eps_approx_ones(g, x, y, 0.0));
}

TEST(EpsApprox, ExactOptimumViaOneOverN) {
    const auto g = GameSpec::diagonal(100);
    EXPECT_TRUE(is_eps_approx_ones(g, 100, 100, 0.01));
    EXPECT_FALSE(is_eps_approx_ones(g, 99, 100, 0.01));
}

TEST(EpsApprox, Errors) {
    EXPECT_THROW(is_eps_approx_ones(GameSpec::diagonal(4), 1, 1, 1.5), ConfigError);
    EXPECT_THROW(is_eps_approx_ones(GameSpec::generalized({0, 1}), 1, 1, 0.5), UnsupportedGame);
    EXPECT_THROW(static_cast<void>(GameSpec::generalized({0, 1}).optimum()), UnsupportedGame);
    EXPECT_EQ(GameSpec::diagonal(7).optimum().x_star_ones, 7u);
}

TEST(CharacteristicProperty, MonotoneInXAntitoneInY) {
    constexpr std::size_t n = 40;
    const auto g = GameSpec::diagonal(n);
    RngHandle rng(404, 0);
    for (int i = 0; i < 10'000; ++i) {
        auto draw = [&] { return ones_at_random(n, static_cast<std::size_t>(rng.uniform_int(0, n)), rng); };
        const auto y = draw();
        auto a = draw();
        auto b = draw();
        if (a.onecount() < b.onecount()) std::swap(a, b);
        ASSERT_GE(payoff(g, a, y), payoff(g, b, y));

        const auto x = draw();
        ASSERT_LE(payoff(g, x, a), payoff(g, x, b));
    }
}

TEST(CharacteristicProperty, PayoffDependsOnlyOnOneCounts) {
    constexpr std::size_t n = 33;
    const auto g = GameSpec::diagonal(n);
    RngHandle rng(405, 0);
    for (int i = 0; i < 2'000; ++i) {
        const auto kx = static_cast<std::size_t>(rng.uniform_int(0, n));
        const auto ky = static_cast<std::size_t>(rng.uniform_int(0, n));
        const int expected = g.payoff_ones(kx, ky);
        ASSERT_EQ(payoff(g, ones_at_random(n, kx, rng), ones_at_random(n, ky, rng)), expected);
        ASSERT_EQ(is_eps_approx(g, ones_at_random(n, kx, rng), ones_at_random(n, ky, rng), 0.3),
                  is_eps_approx_ones(g, kx, ky, 0.3));
    }
}
