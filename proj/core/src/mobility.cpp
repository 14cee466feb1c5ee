#include "tschac/mobility.hpp"

#include <algorithm>
#include <cmath>

namespace tschac {

MotionState step(MotionState state, double dt)
{
    const double v0 = state.speed;
    const double target = std::clamp(state.target_speed, 0.0, state.v_max);
    double v1 = target;
    double path = target * dt;
    if (v0 != target) {
        const double rate = target > v0 ? state.accel : state.decel;
        const double t_hit = std::abs(target - v0) / rate;
        if (t_hit >= dt) {
            v1 = target > v0 ? v0 + rate * dt : v0 - rate * dt;
            path = 0.5 * (v0 + v1) * dt;
        } else {
            // Speed reaches the target inside the tick: ramp, then cruise.
            path = 0.5 * (v0 + target) * t_hit + target * (dt - t_hit);
        }
    }
    v1 = std::clamp(v1, 0.0, state.v_max);

    state.position = state.position + state.heading * path;
    state.odometer += std::abs(path);
    state.speed = v1;
    return state;
}

namespace {

void reflect_axis(double& coordinate, double& heading, double upper)
{
    // A single tick never covers more than one grid span, so one reflection suffices.
    if (coordinate > upper) {
        coordinate = 2.0 * upper - coordinate;
        heading = -heading;
    } else if (coordinate < 0.0) {
        coordinate = -coordinate;
        heading = -heading;
    } else if ((coordinate == upper && heading > 0.0) || (coordinate == 0.0 && heading < 0.0)) {
        heading = -heading;
    }
    coordinate = std::clamp(coordinate, 0.0, upper);
}

}  // namespace

MotionState bounce(MotionState state, const Grid& grid)
{
    reflect_axis(state.position.x, state.heading.x, grid.width);
    reflect_axis(state.position.y, state.heading.y, grid.height);
    return state;
}

MotionState command_speed(MotionState state, const SpeedCommand& command)
{
    const double wanted = command.kind == SpeedCommandKind::RestoreBase ? state.base_speed : command.to;
    state.target_speed = std::clamp(wanted, 0.0, state.v_max);
    return state;
}

}  // namespace tschac
