#pragma once

#include <optional>
#include <string_view>

#include "tschac/mobility.hpp"
#include "tschac/rng.hpp"
#include "tschac/types.hpp"

namespace tschac {

enum class AcMode { Off, AC, ACR };

std::string_view to_string(AcMode mode);
/// Accepts "Off", "AC", "ACR" (case-insensitive); throws ConfigError otherwise.
AcMode parse_ac_mode(std::string_view text);

struct AcParams {
    double alpha = 0.5;
    double t_min_dbm = -95.0;  // activation
    double t_max_dbm = -85.0;  // release
    double v_min = 0.0;
    double v_max = 3.0;
    double accel = 0.5;  // A1
    double decel = 0.5;  // A2
    double acr_eval_window_s = 5.0;

    void validate() const;
};

enum class Direction { SpeedUp, SlowDown };

struct AcState {
    std::optional<double> ewma;
    std::optional<Direction> regulating;  // nullopt: Idle
    double ewma_at_decision = 0.0;
    double last_eval_time = 0.0;
};

/// EWMA of RSSI. The first sample initialises the average.
double ewma_update(AcState& state, double rssi_dbm, double alpha);

/// Position-aware variant. On activation the child speeds up when the peer is
/// ahead along its own heading and slows down otherwise.
std::optional<SpeedCommand> ac_decide(AcState& state, const AcParams& params, Vec2 self_position,
                                      Vec2 self_heading, Vec2 peer_position);

/// Position-blind variant: guesses the direction with a fair coin, then
/// re-evaluates every acr_eval_window and reverses the decision if the EWMA has
/// fallen below its value at the last decision point.
std::optional<SpeedCommand> acr_decide(AcState& state, const AcParams& params, RngStream& rng, double now);

struct SampleContext {
    double now = 0.0;
    Vec2 self_position;
    Vec2 self_heading{1.0, 0.0};
    Vec2 peer_position;
};

/// One controller per regulating (child) node.
class ConnectivityController {
public:
    ConnectivityController(AcMode mode, AcParams params, RngStream rng);

    /// Updates the EWMA, then runs the decide step for the configured mode.
    /// Off mode still tracks the EWMA but never commands anything.
    std::optional<SpeedCommand> on_sample(double rssi_dbm, const SampleContext& context);

    AcMode mode() const noexcept { return mode_; }
    const AcState& state() const noexcept { return state_; }
    const AcParams& params() const noexcept { return params_; }

private:
    AcMode mode_;
    AcParams params_;
    AcState state_;
    RngStream rng_;
};

}  // namespace tschac
