#pragma once

#include "tschac/types.hpp"

namespace tschac {

enum class SpeedCommandKind { Accelerate, Decelerate, RestoreBase };

struct SpeedCommand {
    SpeedCommandKind kind = SpeedCommandKind::RestoreBase;
    double to = 0.0;  // ignored for RestoreBase

    static SpeedCommand accelerate(double v) { return {SpeedCommandKind::Accelerate, v}; }
    static SpeedCommand decelerate(double v) { return {SpeedCommandKind::Decelerate, v}; }
    static SpeedCommand restore_base() { return {SpeedCommandKind::RestoreBase, 0.0}; }

    friend bool operator==(const SpeedCommand&, const SpeedCommand&) = default;
};

struct MotionState {
    Vec2 position;
    Vec2 heading{1.0, 0.0};  // unit vector
    double speed = 0.0;
    double target_speed = 0.0;
    double base_speed = 0.0;
    double accel = 0.5;  // A1, m/s^2
    double decel = 0.5;  // A2, m/s^2
    double v_max = 3.0;
    double odometer = 0.0;

    Vec2 velocity() const { return heading * speed; }
};

/// Linear ramp toward target_speed (accel up, decel down) with trapezoidal
/// position update along the heading. A ramp that ends mid-step is split at
/// that instant, so the result is exact for piecewise-linear speed.
MotionState step(MotionState state, double dt);

/// Reflects a position that left the grid back inside and reverses the
/// corresponding heading component. A node sitting on a wall and heading out
/// of it also turns around. Speed and odometer are untouched.
MotionState bounce(MotionState state, const Grid& grid);

/// Sets target_speed, clamped to [0, v_max]; the ramp happens in `step`.
MotionState command_speed(MotionState state, const SpeedCommand& command);

}  // namespace tschac
