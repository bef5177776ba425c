#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "coea/algorithms.hpp"
#include "coea/telemetry.hpp"

using namespace coea;

namespace {

GenerationRecord rec(std::uint64_t t, std::int64_t X, std::int64_t Y, std::int64_t n = 10, bool in_tube = true) {
    GenerationRecord r;
    r.t = t;
    r.X = X;
    r.Y = Y;
    r.D = std::llabs(X - Y);
    r.H = 2 * n - X - Y;
    r.in_tube = in_tube;
    return r;
}

}  // namespace

TEST(Crossing, Examples) {
    const std::vector<std::int64_t> a{2, 5, 4};
    EXPECT_TRUE(detect_crossing(Snapshot{2, 3, 5}, a, Parity::Even));
    const std::vector<std::int64_t> b{5, 5, 5};
    EXPECT_FALSE(detect_crossing(Snapshot{1, 5, 5}, b, Parity::Odd));
    EXPECT_FALSE(detect_crossing(Snapshot{2, 5, 3}, a, Parity::Even));
    const std::vector<std::int64_t> c{4, 6};
    EXPECT_TRUE(detect_crossing(Snapshot{1, 5, 5}, c, Parity::Odd));
    EXPECT_FALSE(detect_crossing(Snapshot{1, 5, 5}, {}, Parity::Odd));
}

TEST(Cycle, Examples) {
    const std::array<Snapshot, 3> w{Snapshot{2, 3, 5}, Snapshot{3, 6, 5}, Snapshot{4, 6, 8}};
    EXPECT_TRUE(detect_successful_cycle(w, 5.0));
    EXPECT_FALSE(detect_successful_cycle(w, 1.0));
    const std::array<Snapshot, 3> diag{Snapshot{2, 4, 4}, Snapshot{3, 6, 5}, Snapshot{4, 6, 8}};
    EXPECT_FALSE(detect_successful_cycle(diag, 5.0));
}

TEST(Cycle, OddAnchorUsesMirroredChain) {
    const std::array<Snapshot, 3> w{Snapshot{3, 5, 5}, Snapshot{4, 5, 7}, Snapshot{5, 8, 7}};
    EXPECT_TRUE(detect_successful_cycle(w, 3.0));
    EXPECT_FALSE(detect_successful_cycle(w, 2.0));
}

TEST(Cycle, MisalignedWindowRejected) {
    const std::array<Snapshot, 3> w{Snapshot{2, 3, 5}, Snapshot{4, 6, 5}, Snapshot{5, 6, 8}};
    EXPECT_THROW(detect_successful_cycle(w, 5.0), UsageError);
}

TEST(Tube, Examples) {
    const auto spec = TubeSpec::make(0.7, 1000);
    EXPECT_NEAR(spec.c, 2.50, 0.005);
    EXPECT_TRUE(tube_membership(2, spec));
    EXPECT_FALSE(tube_membership(3, spec));
    const auto small = TubeSpec::make(0.5, 3);
    EXPECT_TRUE(std::isfinite(small.c));
    EXPECT_GT(small.c, 0.0);
    EXPECT_TRUE(tube_membership(0, small));
    EXPECT_THROW(TubeSpec::make(0.7, 2), ConfigError);
    EXPECT_THROW(TubeSpec::make(0.0, 100), ConfigError);
    EXPECT_DOUBLE_EQ(TubeSpec::default_kappa(0.6), 0.7);
}

TEST(Drift, Examples) {
    std::vector<GenerationRecord> flat, down;
    for (std::uint64_t t = 1; t <= 20; ++t) {
        flat.push_back(rec(t, 5, 5));
        down.push_back(rec(t, static_cast<std::int64_t>(t / 2), static_cast<std::int64_t>((t + 1) / 2)));
    }
    auto all = [](const GenerationRecord&) { return true; };
    const auto f = drift_estimate(std::span<const GenerationRecord>(flat), all);
    ASSERT_TRUE(f);
    EXPECT_DOUBLE_EQ(f->mean, 0.0);
    EXPECT_EQ(f->count, 19u);
    const auto d = drift_estimate(std::span<const GenerationRecord>(down), all);
    ASSERT_TRUE(d);
    EXPECT_DOUBLE_EQ(d->mean, 1.0);
    EXPECT_DOUBLE_EQ(d->standard_error, 0.0);
}

TEST(Drift, FilterRestartAndGaps) {
    std::vector<GenerationRecord> r{rec(1, 0, 0), rec(2, 1, 0), rec(3, 1, 1), rec(4, 0, 0), rec(6, 3, 3)};
    r[3].after_restart = true;
    auto all = [](const GenerationRecord&) { return true; };
    const auto d = drift_estimate(std::span<const GenerationRecord>(r), all);
    ASSERT_TRUE(d);
    EXPECT_EQ(d->count, 2u);
    EXPECT_DOUBLE_EQ(d->mean, 1.0);
    const auto none = drift_estimate(std::span<const GenerationRecord>(r), [](const GenerationRecord&) { return false; });
    EXPECT_FALSE(none);
    const auto single = drift_estimate(std::span<const GenerationRecord>(r).first(2), all);
    ASSERT_TRUE(single);
    EXPECT_TRUE(std::isnan(single->standard_error));
}

TEST(RunTelemetry, RecordStreamIsConsistent) {
    RunConfig c;
    c.n = 60;
    c.lambda = 60;
    c.chi = 0.6;
    c.eps = 1.0 / 60;
    c.seed = 17;
    std::vector<GenerationRecord> sunk;
    RunTelemetry tel(60, coea::detail::default_tube(c), TelemetryMode::Full,
                     [&](const GenerationRecord& r) { sunk.push_back(r); });
    const auto out = run(Algorithm::CoEA, c, GameSpec::diagonal(60), {}, &tel);
    ASSERT_EQ(tel.records().size(), out.generations);
    ASSERT_EQ(sunk.size(), out.generations);
    const auto tube = *tel.tube();
    std::uint64_t crossings = 0;
    for (std::size_t i = 0; i < sunk.size(); ++i) {
        const auto& r = sunk[i];
        EXPECT_TRUE(r.consistent(60));
        EXPECT_EQ(r.t, i + 1);
        EXPECT_EQ(r.evals, (i + 1) * 60);
        EXPECT_EQ(r.in_tube, tube_membership(r.D, tube));
        crossings += r.crossed ? 1 : 0;
    }
    EXPECT_EQ(crossings, out.stats.crossings);
    EXPECT_LE(out.stats.K_total, out.stats.M_total);
    EXPECT_LE(out.stats.cycles_successful, out.stats.cycles_attempted);
    EXPECT_EQ(tel.stats(), out.stats);
}

TEST(RunTelemetry, SummaryModeMatchesFullModeCounts) {
    RunConfig c;
    c.n = 50;
    c.lambda = 30;
    c.chi = 0.6;
    c.eps = 0.02;
    c.seed = 18;
    RunOptions summary_opts;
    summary_opts.telemetry = TelemetryMode::Summary;
    RunOptions full_opts;
    full_opts.telemetry = TelemetryMode::Full;
    const auto a = run(Algorithm::CoEA, c, GameSpec::diagonal(50), summary_opts);
    const auto b = run(Algorithm::CoEA, c, GameSpec::diagonal(50), full_opts);
    EXPECT_EQ(a.stats, b.stats);
    EXPECT_EQ(a.hitting_evals, b.hitting_evals);
    RunOptions off;
    off.telemetry = TelemetryMode::Off;
    const auto o = run(Algorithm::CoEA, c, GameSpec::diagonal(50), off);
    EXPECT_EQ(o.stats, CrossingStats{});
    EXPECT_EQ(o.hitting_evals, a.hitting_evals);
}

TEST(RunTelemetry, EscapeAndKMCounting) {
    RunTelemetry tel(20, TubeSpec::make(1.0, 100));  // c ~ 3.01
    tel.begin(Snapshot{2, 5, 7});
    const std::vector<std::int64_t> offspring{5, 7, 12, 6};
    // Even, Y > X, in tube: M counts jumps >= 2, K counts jumps >= 2 + c.
    tel.on_generation(Snapshot{2, 5, 7}, Parity::Even, offspring, Snapshot{3, 12, 7}, 4);
    EXPECT_EQ(tel.stats().M_total, 2u);
    EXPECT_EQ(tel.stats().K_total, 1u);
    EXPECT_EQ(tel.stats().escapes, 1u);
    EXPECT_EQ(tel.stats().crossings, 1u);
}

TEST(Csv, GenerationHeaderAndRow) {
    std::ostringstream os;
    const std::vector<GenerationRecord> rs{rec(1, 3, 4)};
    write_csv(os, rs);
    EXPECT_EQ(os.str(), "t,X,Y,D,H,crossed,in_tube,max_jump,evals\n1,3,4,1,13,0,1,0,0\n");
}
