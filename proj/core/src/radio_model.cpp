#include "tschac/radio_model.hpp"

#include <algorithm>
#include <cmath>

#include "tschac/error.hpp"

namespace tschac {

void RadioParams::validate() const
{
    if (!(d0_m > 0.0)) throw ConfigError("radio.d0", "must be > 0");
    if (!(eta > 0.0)) throw ConfigError("radio.eta", "must be > 0");
    if (!(logistic_width_db > 0.0)) throw ConfigError("radio.logistic_width", "must be > 0");
    if (!(max_range_m > 0.0)) throw ConfigError("radio.max_range", "must be > 0");
    if (!(shadow_sigma_db >= 0.0)) throw ConfigError("radio.shadow_sigma", "must be >= 0");
    if (!(rssi_floor_dbm < rssi50_dbm)) throw ConfigError("radio.rssi_floor", "must be < radio.rssi_50");
    if (!std::isfinite(tx_power_dbm)) throw ConfigError("radio.tx_power", "must be finite");
    if (!std::isfinite(pl0_db)) throw ConfigError("radio.pl0", "must be finite");
}

double mean_rssi(const RadioParams& params, double distance_m)
{
    const double d = std::max(distance_m, params.d0_m);
    return params.tx_power_dbm - (params.pl0_db + 10.0 * params.eta * std::log10(d / params.d0_m));
}

double sample_rssi(const RadioParams& params, double distance_m, RngStream& rng)
{
    const double shadow = rng.normal(0.0, 1.0) * params.shadow_sigma_db;
    return mean_rssi(params, distance_m) + shadow;
}

double reception_probability(const RadioParams& params, double rssi_dbm, double distance_m)
{
    if (distance_m > params.max_range_m || rssi_dbm < params.rssi_floor_dbm) {
        return 0.0;
    }
    const double z = (rssi_dbm - params.rssi50_dbm) / params.logistic_width_db;
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

std::optional<ReceivedFrame> try_receive(const RadioParams& params, double distance_m, RngStream& rng)
{
    const double rssi = sample_rssi(params, distance_m, rng);
    const double u = rng.uniform();
    if (u < reception_probability(params, rssi, distance_m)) {
        return ReceivedFrame{rssi};
    }
    return std::nullopt;
}

CalibrationResult calibrate_radio(const RadioParams& base, const CalibrationTargets& targets)
{
    if (!(targets.near_distance_m < targets.far_distance_m)) {
        throw ConfigError("calibration.near_distance", "must be < far_distance");
    }
    if (!(targets.eta_step > 0.0) || !(targets.rssi50_grid_db > 0.0)) {
        throw ConfigError("calibration.eta_step", "steps must be > 0");
    }
    const double w = base.logistic_width_db;
    // p >= q  <=>  rssi - rssi50 >= w * ln(q / (1 - q))
    const auto logit = [](double q) { return std::log(q / (1.0 - q)); };

    const int steps = static_cast<int>(std::floor((targets.eta_max - targets.eta_min) / targets.eta_step + 1e-9));
    for (int k = 0; k <= steps; ++k) {
        RadioParams p = base;
        p.eta = std::round((targets.eta_min + k * targets.eta_step) * 1e6) / 1e6;
        p.shadow_sigma_db = 0.0;

        const double rssi_near = mean_rssi(p, targets.near_distance_m);
        const double rssi_far = mean_rssi(p, targets.far_distance_m);
        const double lower = rssi_far - w * logit(targets.far_max_probability);
        const double upper = std::min(rssi_near - w * logit(targets.near_min_probability),
                                      targets.activation_rssi_dbm - w * logit(targets.activation_min_probability));
        if (lower > upper) continue;

        const double grid = targets.rssi50_grid_db;
        double candidate = std::round(0.5 * (lower + upper) / grid) * grid;
        if (candidate < lower) candidate = std::ceil(lower / grid) * grid;
        if (candidate > upper) candidate = std::floor(upper / grid) * grid;
        if (candidate < lower || candidate > upper) continue;

        p.rssi50_dbm = candidate;
        p.rssi_floor_dbm = candidate - 8.0;
        CalibrationResult result{p, 0.0, 0.0, 0.0};
        result.near_probability = reception_probability(p, rssi_near, targets.near_distance_m);
        result.far_probability = reception_probability(p, rssi_far, targets.far_distance_m);
        result.activation_probability = reception_probability(p, targets.activation_rssi_dbm, 0.0);
        result.params.shadow_sigma_db = base.shadow_sigma_db;
        return result;
    }
    throw ConfigError("radio.eta", "no path-loss exponent in the scanned range meets the calibration targets");
}

}  // namespace tschac
