#pragma once

#include <optional>

#include "tschac/rng.hpp"

namespace tschac {

/// Log-distance path loss with i.i.d. Gaussian shadowing and a logistic
/// reception curve. Defaults come from `calibrate_radio` run against the
/// default `CalibrationTargets`: free-space loss up to a 100 m reference
/// (80 dB at 2.4 GHz), exponent 4.8 beyond it.
struct RadioParams {
    double tx_power_dbm = 0.0;
    double pl0_db = 80.0;
    double d0_m = 100.0;
    double eta = 4.8;
    double shadow_sigma_db = 3.0;
    double rssi50_dbm = -102.0;
    double logistic_width_db = 3.0;
    double max_range_m = 450.0;
    double rssi_floor_dbm = -110.0;

    /// Throws ConfigError naming the offending "radio.*" field.
    void validate() const;
};

struct ReceivedFrame {
    double rssi_dbm;
};

/// tx_power - (pl0 + 10 eta log10(d / d0)); distances below d0 clamp to d0.
double mean_rssi(const RadioParams& params, double distance_m);

/// mean_rssi plus one Normal(0, shadow_sigma^2) draw.
double sample_rssi(const RadioParams& params, double distance_m, RngStream& rng);

/// Zero beyond max_range or under rssi_floor, logistic in RSSI otherwise.
double reception_probability(const RadioParams& params, double rssi_dbm, double distance_m);

/// One reception attempt. Always consumes exactly one normal and one uniform
/// draw, so stream position does not depend on geometry.
std::optional<ReceivedFrame> try_receive(const RadioParams& params, double distance_m, RngStream& rng);

/// Operating envelope the defaults are tuned to: a reliable link at the
/// nominal two-robot separation, a dead link at the nominal range, and a
/// still-usable link at the lowest activation threshold the controller uses.
struct CalibrationTargets {
    double near_distance_m = 130.0;
    double near_min_probability = 0.95;
    double far_distance_m = 450.0;
    double far_max_probability = 0.05;
    double activation_rssi_dbm = -95.0;
    double activation_min_probability = 0.90;
    double eta_min = 2.0;
    double eta_max = 8.0;
    double eta_step = 0.1;
    double rssi50_grid_db = 0.5;
};

struct CalibrationResult {
    RadioParams params;
    double near_probability;
    double far_probability;
    double activation_probability;
};

/// Keeps tx_power, pl0, d0, logistic width and shadowing from `base`, then scans
/// eta upward and returns the first (eta, rssi_50) whose rssi_50 sits on the
/// `rssi50_grid_db` grid and meets every target with shadowing off. rssi_50 is
/// the grid point closest to the middle of the feasible interval. rssi_floor is
/// placed 8 dB under rssi_50. Throws ConfigError when no eta in range works.
CalibrationResult calibrate_radio(const RadioParams& base, const CalibrationTargets& targets = {});

}  // namespace tschac
