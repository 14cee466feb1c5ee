#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "tschac/active_connectivity.hpp"
#include "tschac/error.hpp"

using namespace tschac;

namespace {

AcParams params(double t_min, double t_max, double alpha = 0.5)
{
    AcParams p;
    p.t_min_dbm = t_min;
    p.t_max_dbm = t_max;
    p.alpha = alpha;
    return p;
}

AcState with_ewma(double v)
{
    AcState s;
    s.ewma = v;
    return s;
}

// First sample index at which a fresh controller issues a command.
std::optional<std::size_t> trigger_index(AcMode mode, double alpha, const std::vector<double>& trace)
{
    ConnectivityController c(mode, params(-90.0, -85.0, alpha), make_rng(0, "acr/1"));
    SampleContext ctx;
    ctx.peer_position = {100.0, 0.0};
    for (std::size_t i = 0; i < trace.size(); ++i) {
        ctx.now = static_cast<double>(i);
        if (c.on_sample(trace[i], ctx)) return i;
    }
    return std::nullopt;
}

}  // namespace

TEST(Ewma, WorkedExamples)
{
    auto s = with_ewma(-50.0);
    EXPECT_DOUBLE_EQ(ewma_update(s, -90.0, 1.0), -90.0);
    s = with_ewma(-80.0);
    EXPECT_DOUBLE_EQ(ewma_update(s, -90.0, 0.5), -85.0);
    s = with_ewma(-80.0);
    EXPECT_DOUBLE_EQ(ewma_update(s, -60.0, 0.25), -75.0);
}

TEST(Ewma, FirstSampleInitialises)
{
    AcState s;
    EXPECT_FALSE(s.ewma);
    EXPECT_DOUBLE_EQ(ewma_update(s, -93.5, 0.25), -93.5);
}

TEST(Ewma, BoundedAndConvergentOnRandomTraces)
{
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> rssi(-110.0, -40.0);
    std::uniform_real_distribution<double> alpha_dist(0.01, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double alpha = alpha_dist(gen);
        AcState s;
        double lo = 1e9;
        double hi = -1e9;
        for (int i = 0; i < 50; ++i) {
            const double r = rssi(gen);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
            const double e = ewma_update(s, r, alpha);
            ASSERT_TRUE(std::isfinite(e));
            ASSERT_GE(e, lo - 1e-12);
            ASSERT_LE(e, hi + 1e-12);
        }
        const double target = rssi(gen);
        const double start = std::abs(*s.ewma - target);
        for (int k = 1; k <= 40; ++k) {
            ewma_update(s, target, alpha);
            ASSERT_LE(std::abs(*s.ewma - target), start * std::pow(1.0 - alpha, k) + 1e-12);
        }
    }
}

TEST(AcDecide, PeerAheadAccelerates)
{
    auto s = with_ewma(-92.0);
    const auto cmd = ac_decide(s, params(-90.0, -85.0), {0.0, 0.0}, {1.0, 0.0}, {200.0, 0.0});
    EXPECT_EQ(cmd, SpeedCommand::accelerate(3.0));
    EXPECT_EQ(s.regulating, Direction::SpeedUp);
}

TEST(AcDecide, PeerBehindDecelerates)
{
    auto s = with_ewma(-92.0);
    const auto cmd = ac_decide(s, params(-90.0, -85.0), {200.0, 0.0}, {1.0, 0.0}, {0.0, 0.0});
    EXPECT_EQ(cmd, SpeedCommand::decelerate(0.0));
    EXPECT_EQ(s.regulating, Direction::SlowDown);
}

TEST(AcDecide, ReleaseAtUpperThreshold)
{
    const auto p = params(-90.0, -85.0);
    auto s = with_ewma(-92.0);
    ASSERT_TRUE(ac_decide(s, p, {0.0, 0.0}, {1.0, 0.0}, {200.0, 0.0}));
    s.ewma = -86.0;
    EXPECT_FALSE(ac_decide(s, p, {0.0, 0.0}, {1.0, 0.0}, {200.0, 0.0}));
    s.ewma = -84.0;
    EXPECT_EQ(ac_decide(s, p, {0.0, 0.0}, {1.0, 0.0}, {200.0, 0.0}), SpeedCommand::restore_base());
    EXPECT_FALSE(s.regulating);
}

TEST(AcDecide, HysteresisBandIsQuiet)
{
    const auto p = params(-90.0, -85.0);
    for (double e = -90.0; e < -85.0; e += 0.25) {
        auto s = with_ewma(e);
        EXPECT_FALSE(ac_decide(s, p, {0.0, 0.0}, {1.0, 0.0}, {200.0, 0.0})) << e;
        EXPECT_FALSE(s.regulating);
    }
}

TEST(AcrDecide, FirstGuessIsFair)
{
    // chi-square with one degree of freedom; 6.635 is the 0.01 critical value
    const int n = 2000;
    int up = 0;
    for (int seed = 0; seed < n; ++seed) {
        auto s = with_ewma(-95.0);
        auto rng = make_rng(static_cast<std::uint64_t>(seed), "acr/1");
        const auto cmd = acr_decide(s, params(-90.0, -85.0), rng, 0.0);
        ASSERT_TRUE(cmd);
        up += cmd->kind == SpeedCommandKind::Accelerate;
    }
    const double e = n / 2.0;
    const double chi2 = (up - e) * (up - e) / e + ((n - up) - e) * ((n - up) - e) / e;
    EXPECT_LT(chi2, 6.635) << up << " of " << n;
}

TEST(AcrDecide, FlipsWhenLinkKeepsDegrading)
{
    const auto p = params(-90.0, -85.0);
    AcState s = with_ewma(-91.0);
    s.regulating = Direction::SpeedUp;
    s.ewma_at_decision = -91.0;
    s.last_eval_time = 0.0;
    auto rng = make_rng(0, "acr/1");
    s.ewma = -94.0;
    EXPECT_FALSE(acr_decide(s, p, rng, 4.99));
    EXPECT_EQ(acr_decide(s, p, rng, 5.0), SpeedCommand::decelerate(0.0));
    EXPECT_EQ(s.regulating, Direction::SlowDown);
    EXPECT_DOUBLE_EQ(s.ewma_at_decision, -94.0);
}

TEST(AcrDecide, KeepsDecisionWhenImproving)
{
    const auto p = params(-90.0, -85.0);
    AcState s = with_ewma(-91.0);
    s.regulating = Direction::SlowDown;
    s.ewma_at_decision = -93.0;
    auto rng = make_rng(0, "acr/1");
    EXPECT_FALSE(acr_decide(s, p, rng, 6.0));
    EXPECT_EQ(s.regulating, Direction::SlowDown);
    EXPECT_DOUBLE_EQ(s.ewma_at_decision, -91.0);
    EXPECT_DOUBLE_EQ(s.last_eval_time, 6.0);
}

TEST(AcrDecide, ReleaseWinsOverEvaluation)
{
    const auto p = params(-90.0, -85.0);
    AcState s = with_ewma(-84.0);
    s.regulating = Direction::SlowDown;
    s.ewma_at_decision = -80.0;
    auto rng = make_rng(0, "acr/1");
    EXPECT_EQ(acr_decide(s, p, rng, 100.0), SpeedCommand::restore_base());
    EXPECT_FALSE(s.regulating);
}

TEST(AcrDecide, WrongGuessFlippedWithinOneWindow)
{
    // Strictly deteriorating samples every 0.5 s; whatever the first guess,
    // the controller must change its mind at most one window later.
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        ConnectivityController c(AcMode::ACR, params(-90.0, -85.0, 0.5), make_rng(seed, "acr/1"));
        std::optional<double> first_at;
        std::optional<double> flip_at;
        for (int i = 0; i < 100 && !flip_at; ++i) {
            const double now = 0.5 * i;
            if (auto cmd = c.on_sample(-85.0 - 0.5 * i, {now, {}, {1.0, 0.0}, {}})) {
                (first_at ? flip_at : first_at) = now;
            }
        }
        ASSERT_TRUE(first_at);
        ASSERT_TRUE(flip_at);
        EXPECT_LE(*flip_at - *first_at, 5.0 + 1e-9) << "seed " << seed;
    }
}

TEST(Controller, OffNeverCommands)
{
    ConnectivityController c(AcMode::Off, AcParams{}, make_rng(0, "acr/1"));
    for (int i = 0; i < 100; ++i) EXPECT_FALSE(c.on_sample(-120.0 + i, {static_cast<double>(i), {}, {1.0, 0.0}, {}}));
    EXPECT_TRUE(c.state().ewma);
}

TEST(Controller, SingleLowSampleEntersRegulation)
{
    ConnectivityController c(AcMode::AC, params(-90.0, -85.0), make_rng(0, "acr/1"));
    const auto cmd = c.on_sample(-95.0, {0.0, {0.0, 0.0}, {1.0, 0.0}, {100.0, 0.0}});
    EXPECT_EQ(cmd, SpeedCommand::accelerate(3.0));
    EXPECT_DOUBLE_EQ(*c.state().ewma, -95.0);
}

TEST(Controller, HigherAlphaTriggersEarlier)
{
    std::vector<double> trace;
    for (int i = 0; i < 40; ++i) trace.push_back(-80.0 - i);
    const auto slow = trigger_index(AcMode::AC, 0.25, trace);
    const auto fast = trigger_index(AcMode::AC, 0.75, trace);
    ASSERT_TRUE(slow);
    ASSERT_TRUE(fast);
    EXPECT_LT(*fast, *slow);
}

TEST(AcParams, Validation)
{
    try {
        params(-85.0, -90.0).validate();
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("t_min must be < t_max"), std::string::npos);
    }
    EXPECT_THROW(params(-90.0, -85.0, 0.0).validate(), ConfigError);
    EXPECT_THROW(params(-90.0, -85.0, 1.5).validate(), ConfigError);
}

TEST(AcMode, ParseAndPrint)
{
    for (auto m : {AcMode::Off, AcMode::AC, AcMode::ACR}) EXPECT_EQ(parse_ac_mode(to_string(m)), m);
    EXPECT_EQ(parse_ac_mode("acr"), AcMode::ACR);
    EXPECT_THROW(parse_ac_mode("fast"), ConfigError);
}
