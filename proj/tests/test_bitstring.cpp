#include <cmath>
#include <cstdint>
#include <map>

#include <gtest/gtest.h>

#include "coea/bitstring.hpp"
#include "coea/oracles.hpp"
#include "stats_support.hpp"

using namespace coea;

TEST(Onecount, Examples) {
    EXPECT_EQ(onecount(Bitstring(8)), 0u);
    EXPECT_EQ(onecount(Bitstring::all_ones(8)), 8u);
    EXPECT_EQ(onecount(Bitstring::from_string("10110")), 3u);
}

TEST(Onecount, CacheMatchesRecountAcrossWordBoundaries) {
    RngHandle rng(3, 0);
    for (std::size_t n : {1u, 63u, 64u, 65u, 127u, 200u}) {
        Bitstring b = Bitstring::uniform(n, rng);
        EXPECT_EQ(b.onecount(), b.recount());
        for (int i = 0; i < 500; ++i) {
            b.flip(static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1)));
            ASSERT_EQ(b.onecount(), b.recount());
        }
        EXPECT_EQ(Bitstring::all_ones(n).recount(), n);
    }
}

TEST(Bitstring, ConcatAndSliceRoundTrip) {
    const auto x = Bitstring::from_string("1100101");
    const auto y = Bitstring::from_string("0011");
    const auto z = Bitstring::concat(x, y);
    EXPECT_EQ(z.to_string(), "11001010011");
    EXPECT_EQ(z.slice(0, 7), x);
    EXPECT_EQ(z.slice(7, 4), y);
    EXPECT_EQ(z.count_range(7, 4), 2u);
    EXPECT_THROW(z.slice(8, 4), ConfigError);
    EXPECT_THROW(Bitstring::from_string("10a"), ConfigError);
}

TEST(Mutate, VanishingRateLeavesParentUnchanged) {
    RngHandle rng(11, 0);
    const auto parent = Bitstring::from_string("1011001110");
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(mutate(parent, {1e-12, 10}, rng), parent);
}

TEST(Mutate, RateNearOneComplementsSingleBit) {
    RngHandle rng(12, 0);
    const auto zero = Bitstring(1);
    int flipped = 0;
    for (int i = 0; i < 1000; ++i) flipped += mutate(zero, {1.0 - 1e-12, 1}, rng).get(0) ? 1 : 0;
    EXPECT_EQ(flipped, 1000);
}

TEST(Mutate, MeanFlipsWithinBinomialInterval) {
    constexpr std::size_t n = 100;
    constexpr double chi = 0.6;
    constexpr int calls = 1'000'000;
    RngHandle rng(13, 0);
    const Bitstring parent(n);
    double total = 0.0;
    for (int i = 0; i < calls; ++i) total += static_cast<double>(mutate(parent, {chi, n}, rng).onecount());
    // Sum of 1e6 Bin(n, chi/n) draws; 99.9% two-sided z = 3.2905.
    const double var = n * (chi / n) * (1 - chi / n);
    const double half = 3.2905 * std::sqrt(var / calls);
    EXPECT_NEAR(total / calls, chi, half);
}

TEST(Mutate, LengthMismatchAndBadRateRejected) {
    RngHandle rng(1, 0);
    EXPECT_THROW(mutate(Bitstring(5), {0.5, 6}, rng), ConfigError);
    EXPECT_THROW(mutate(Bitstring(5), {0.0, 5}, rng), ConfigError);
    EXPECT_THROW(mutate(Bitstring(5), {5.0, 5}, rng), ConfigError);
}

TEST(Mutate, SameStreamSameOffspring) {
    RngHandle a(99, 4), b(99, 4), c(99, 5);
    const auto parent = Bitstring(300);
    bool differs = false;
    for (int i = 0; i < 200; ++i) {
        const auto ca = mutate(parent, {3.0, 300}, a);
        EXPECT_EQ(ca, mutate(parent, {3.0, 300}, b));
        differs = differs || !(ca == mutate(parent, {3.0, 300}, c));
    }
    EXPECT_TRUE(differs);
}

TEST(Jump, SupportAtExtremes) {
    RngHandle rng(21, 0);
    for (int i = 0; i < 10'000; ++i) {
        EXPECT_GE(jump(0, {0.6, 100}, rng), 0);
        EXPECT_LE(jump(100, {0.6, 100}, rng), 0);
    }
    EXPECT_THROW(jump(101, {0.6, 100}, rng), ConfigError);
}

TEST(Jump, MatchesExactConvolutionPmf) {
    constexpr std::uint64_t samples = 1'000'000;
    RngHandle rng(22, 0);
    std::map<std::int64_t, std::uint64_t> counts;
    for (std::uint64_t i = 0; i < samples; ++i) ++counts[jump(50, {0.6, 100}, rng)];
    const auto pmf = oracles::jump_pmf(100, 50, 0.6);
    const auto r = test::chi_square_fit(counts, pmf.min_jump(), pmf.max_jump(), [&](std::int64_t k) { return pmf.at(k); },
                                        samples, 1e-3);
    EXPECT_TRUE(r.accepted()) << "chi2=" << r.statistic << " critical=" << r.critical << " dof=" << r.dof;
}

class JumpGrid : public ::testing::TestWithParam<std::tuple<std::size_t, std::size_t, double>> {};

TEST_P(JumpGrid, MutateOneCountChangeMatchesPmf) {
    const auto [n, s, chi] = GetParam();
    constexpr std::uint64_t samples = 200'000;
    RngHandle rng(23, s);
    const auto parent = Bitstring::with_ones(n, s);
    std::map<std::int64_t, std::uint64_t> counts;
    for (std::uint64_t i = 0; i < samples; ++i)
        ++counts[static_cast<std::int64_t>(mutate(parent, {chi, n}, rng).onecount()) - static_cast<std::int64_t>(s)];
    const auto pmf = oracles::jump_pmf(n, s, chi);
    const auto r = test::chi_square_fit(counts, pmf.min_jump(), pmf.max_jump(), [&](std::int64_t k) { return pmf.at(k); },
                                        samples, 1e-3);
    EXPECT_TRUE(r.accepted()) << "chi2=" << r.statistic << " critical=" << r.critical;
}

INSTANTIATE_TEST_SUITE_P(Grid, JumpGrid,
                         ::testing::Values(std::make_tuple(20u, 0u, 0.6), std::make_tuple(20u, 20u, 0.6),
                                           std::make_tuple(64u, 17u, 1.0), std::make_tuple(100u, 75u, 2.2),
                                           std::make_tuple(130u, 65u, 0.3)));
