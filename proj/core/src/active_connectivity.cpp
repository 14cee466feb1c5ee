#include "tschac/active_connectivity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "tschac/error.hpp"

namespace tschac {

std::string_view to_string(AcMode mode)
{
    switch (mode) {
    case AcMode::Off: return "Off";
    case AcMode::AC: return "AC";
    case AcMode::ACR: return "ACR";
    }
    return "?";
}

AcMode parse_ac_mode(std::string_view text)
{
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "off") return AcMode::Off;
    if (lower == "ac") return AcMode::AC;
    if (lower == "acr") return AcMode::ACR;
    throw ConfigError("mode", "unknown mode \"" + std::string(text) + "\" (expected Off, AC or ACR)");
}

void AcParams::validate() const
{
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("ac.alpha", "must be in (0, 1]");
    if (!(t_min_dbm < t_max_dbm)) throw ConfigError("ac.t_min", "t_min must be < t_max");
    if (!(v_min >= 0.0)) throw ConfigError("ac.v_min", "must be >= 0");
    if (!(v_min < v_max)) throw ConfigError("ac.v_min", "v_min must be < v_max");
    if (!(accel > 0.0)) throw ConfigError("ac.accel", "must be > 0");
    if (!(decel > 0.0)) throw ConfigError("ac.decel", "must be > 0");
    if (!(acr_eval_window_s > 0.0)) throw ConfigError("ac.acr_eval_window", "must be > 0");
}

double ewma_update(AcState& state, double rssi_dbm, double alpha)
{
    state.ewma = state.ewma ? alpha * rssi_dbm + (1.0 - alpha) * *state.ewma : rssi_dbm;
    return *state.ewma;
}

namespace {

SpeedCommand command_for(Direction direction, const AcParams& params)
{
    return direction == Direction::SpeedUp ? SpeedCommand::accelerate(params.v_max)
                                           : SpeedCommand::decelerate(params.v_min);
}

Direction opposite(Direction d)
{
    return d == Direction::SpeedUp ? Direction::SlowDown : Direction::SpeedUp;
}

std::optional<SpeedCommand> release(AcState& state, const AcParams& params)
{
    if (state.regulating && state.ewma && *state.ewma >= params.t_max_dbm) {
        state.regulating.reset();
        return SpeedCommand::restore_base();
    }
    return std::nullopt;
}

}  // namespace

std::optional<SpeedCommand> ac_decide(AcState& state, const AcParams& params, Vec2 self_position,
                                      Vec2 self_heading, Vec2 peer_position)
{
    if (!state.ewma) return std::nullopt;
    if (state.regulating) return release(state, params);
    if (*state.ewma >= params.t_min_dbm) return std::nullopt;

    // Peer ahead along our heading: only speeding up closes the gap.
    const bool peer_ahead = dot(peer_position - self_position, self_heading) > 0.0;
    const Direction direction = peer_ahead ? Direction::SpeedUp : Direction::SlowDown;
    state.regulating = direction;
    state.ewma_at_decision = *state.ewma;
    return command_for(direction, params);
}

std::optional<SpeedCommand> acr_decide(AcState& state, const AcParams& params, RngStream& rng, double now)
{
    if (!state.ewma) return std::nullopt;

    if (!state.regulating) {
        if (*state.ewma >= params.t_min_dbm) return std::nullopt;
        const Direction direction = rng.uniform() < 0.5 ? Direction::SpeedUp : Direction::SlowDown;
        state.regulating = direction;
        state.ewma_at_decision = *state.ewma;
        state.last_eval_time = now;
        return command_for(direction, params);
    }

    if (auto restore = release(state, params)) return restore;

    if (now - state.last_eval_time < params.acr_eval_window_s) return std::nullopt;

    const bool worse = *state.ewma < state.ewma_at_decision;
    state.ewma_at_decision = *state.ewma;
    state.last_eval_time = now;
    if (!worse) return std::nullopt;
    state.regulating = opposite(*state.regulating);
    return command_for(*state.regulating, params);
}

ConnectivityController::ConnectivityController(AcMode mode, AcParams params, RngStream rng)
    : mode_(mode), params_(params), rng_(std::move(rng))
{
}

std::optional<SpeedCommand> ConnectivityController::on_sample(double rssi_dbm, const SampleContext& context)
{
    ewma_update(state_, rssi_dbm, params_.alpha);
    switch (mode_) {
    case AcMode::Off:
        return std::nullopt;
    case AcMode::AC:
        return ac_decide(state_, params_, context.self_position, context.self_heading, context.peer_position);
    case AcMode::ACR:
        return acr_decide(state_, params_, rng_, context.now);
    }
    return std::nullopt;
}

}  // namespace tschac
