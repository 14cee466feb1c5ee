#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tschac/mobility.hpp"

using namespace tschac;

namespace {

MotionState moving(double speed, double target)
{
    MotionState s;
    s.speed = speed;
    s.target_speed = target;
    s.base_speed = speed;
    return s;
}

// Runs `ticks` steps of length dt, bouncing on the grid like the simulator does.
MotionState drive(MotionState s, double dt, int ticks, const Grid& grid)
{
    for (int i = 0; i < ticks; ++i) s = bounce(step(s, dt), grid);
    return s;
}

}  // namespace

TEST(Mobility, DecelerationStepExample)
{
    const auto s = step(moving(3.0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(s.speed, 2.5);
    EXPECT_DOUBLE_EQ(s.position.x, 2.75);
    EXPECT_DOUBLE_EQ(s.odometer, 2.75);
}

TEST(Mobility, SteadyStateIsExact)
{
    const auto s = step(moving(1.7, 1.7), 0.3);
    EXPECT_DOUBLE_EQ(s.position.x, 1.7 * 0.3);
}

TEST(Mobility, RampFromRestClosedForm)
{
    // v / A = 6 s and v^2 / (2A) = 9 m
    auto s = moving(0.0, 3.0);
    for (int i = 0; i < 59; ++i) s = step(s, 0.1);
    EXPECT_LT(s.speed, 3.0);
    s = step(s, 0.1);
    EXPECT_NEAR(s.speed, 3.0, 1e-9);
    EXPECT_NEAR(s.position.x, 9.0, 1e-9);
}

TEST(Mobility, RampCrossingTargetMidTick)
{
    // 0.2 m/s from 2.9 reaches 3 after 0.2 s of a 1 s step: 0.2 * 2.95 + 0.8 * 3
    auto s = moving(2.9, 3.0);
    s = step(s, 1.0);
    EXPECT_DOUBLE_EQ(s.speed, 3.0);
    EXPECT_NEAR(s.position.x, 0.2 * 2.95 + 0.8 * 3.0, 1e-12);
}

TEST(Mobility, CommandSpeed)
{
    auto s = moving(1.0, 1.0);
    s.base_speed = 3.0;
    EXPECT_DOUBLE_EQ(command_speed(s, SpeedCommand::restore_base()).target_speed, 3.0);
    EXPECT_DOUBLE_EQ(command_speed(s, SpeedCommand::decelerate(0.0)).target_speed, 0.0);
    EXPECT_DOUBLE_EQ(command_speed(s, SpeedCommand::accelerate(5.0)).target_speed, 3.0);
    EXPECT_DOUBLE_EQ(command_speed(s, SpeedCommand::decelerate(-2.0)).target_speed, 0.0);
    // the command only moves the target; speed ramps on the next step
    EXPECT_DOUBLE_EQ(command_speed(s, SpeedCommand::decelerate(0.0)).speed, 1.0);
    auto slowed = step(command_speed(moving(3.0, 3.0), SpeedCommand::decelerate(0.0)), 0.1);
    EXPECT_NEAR(slowed.speed, 3.0 - 0.5 * 0.1, 1e-12);
}

TEST(Mobility, BounceAtFarWall)
{
    const Grid grid;
    auto s = moving(3.0, 3.0);
    s.position = {1999.9, 0.0};
    s = bounce(step(s, 0.1), grid);
    EXPECT_EQ(s.heading, (Vec2{-1.0, 0.0}));
    EXPECT_LE(s.position.x, 2000.0);
    EXPECT_NEAR(s.position.x, 2000.0 - 0.2, 1e-9);  // 0.3 m step, 0.2 m past the wall
    EXPECT_DOUBLE_EQ(s.speed, 3.0);
}

TEST(Mobility, BounceLeavesInteriorAlone)
{
    auto s = moving(2.0, 2.0);
    s.position = {1000.0, 500.0};
    s.odometer = 12.0;
    const auto b = bounce(s, Grid{});
    EXPECT_EQ(b.position, s.position);
    EXPECT_EQ(b.heading, s.heading);
    EXPECT_EQ(b.speed, s.speed);
    EXPECT_EQ(b.odometer, s.odometer);
}

TEST(Mobility, BounceKeepsSpeedAndOdometer)
{
    auto s = moving(3.0, 3.0);
    s.position = {2000.5, 0.0};
    s.odometer = 77.0;
    const auto b = bounce(s, Grid{});
    EXPECT_EQ(b.speed, 3.0);
    EXPECT_EQ(b.odometer, 77.0);
    EXPECT_DOUBLE_EQ(b.position.x, 1999.5);
}

TEST(Mobility, FullRunOdometer)
{
    // 3 m/s for 1800 s from x = 0: 2000 out, 2000 back, 1400 out again
    const Grid grid;
    auto s = moving(3.0, 3.0);
    int turnarounds = 0;
    Vec2 heading = s.heading;
    for (int i = 0; i < 18000; ++i) {
        s = bounce(step(s, 0.1), grid);
        if (!(s.heading == heading)) {
            ++turnarounds;
            heading = s.heading;
        }
    }
    EXPECT_NEAR(s.odometer, 5400.0, 1e-6);
    EXPECT_EQ(turnarounds, 2);
    EXPECT_NEAR(s.position.x, 1400.0, 1e-6);
}

TEST(Mobility, RandomCommandSequencesStayInBounds)
{
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> dt_dist(0.001, 0.5);
    std::uniform_int_distribution<int> cmd_dist(0, 3);
    std::uniform_real_distribution<double> to_dist(-2.0, 6.0);
    const Grid grid{300.0, 300.0};
    for (int trial = 0; trial < 200; ++trial) {
        MotionState s;
        s.position = {150.0, 150.0};
        s.heading = trial % 2 ? Vec2{0.0, 1.0} : Vec2{1.0, 0.0};
        s.base_speed = 1.5;
        s.accel = 0.2 + 0.1 * (trial % 5);
        s.decel = 0.3 + 0.1 * (trial % 3);
        for (int i = 0; i < 300; ++i) {
            switch (cmd_dist(gen)) {
            case 0: s = command_speed(s, SpeedCommand::accelerate(to_dist(gen))); break;
            case 1: s = command_speed(s, SpeedCommand::decelerate(to_dist(gen))); break;
            case 2: s = command_speed(s, SpeedCommand::restore_base()); break;
            default: break;
            }
            const double dt = dt_dist(gen);
            const double before_speed = s.speed;
            const double before_odo = s.odometer;
            s = bounce(step(s, dt), grid);
            ASSERT_GE(s.speed, 0.0);
            ASSERT_LE(s.speed, s.v_max);
            ASSERT_LE(std::abs(s.speed - before_speed), std::max(s.accel, s.decel) * dt + 1e-12);
            ASSERT_GE(s.odometer, before_odo);
            ASSERT_GE(s.position.x, 0.0);
            ASSERT_LE(s.position.x, grid.width);
            ASSERT_GE(s.position.y, 0.0);
            ASSERT_LE(s.position.y, grid.height);
        }
    }
}

TEST(Mobility, OdometerMatchesAnalyticIntegral)
{
    // Ramp 0 -> 3 m/s on a tick that does not divide the 6 s ramp time. The
    // speed profile is piecewise linear, so trapezoidal integration is exact.
    const double dt = 0.07;
    auto s = moving(0.0, 3.0);
    auto analytic = [](double time) { return time <= 6.0 ? 0.25 * time * time : 9.0 + 3.0 * (time - 6.0); };
    for (int i = 1; i <= 200; ++i) {
        s = step(s, dt);
        ASSERT_NEAR(s.odometer, analytic(i * dt), 1e-9) << "tick " << i;
    }
}
