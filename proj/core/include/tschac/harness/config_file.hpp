#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tschac/config.hpp"

namespace tschac::harness {

struct ThresholdPair {
    double t_min_dbm;
    double t_max_dbm;
    friend bool operator==(const ThresholdPair&, const ThresholdPair&) = default;
};

/// A full experiment: the base scenario plus the grid swept over it.
struct SweepSpec {
    SimConfig base;
    std::vector<AcMode> modes{AcMode::Off, AcMode::AC, AcMode::ACR};
    std::vector<double> alphas{0.25, 0.5, 0.75};
    std::vector<ThresholdPair> threshold_pairs{{-90.0, -85.0}, {-95.0, -85.0}};
    std::vector<std::uint64_t> seeds;  // default 0..19

    void validate() const;
};

SweepSpec default_sweep();

/// Reads a TOML config. Sections: [scenario] (with [[scenario.nodes]]),
/// [radio], [mac], [ac], [sweep]. Keys outside any section belong to
/// [scenario]. Unknown keys are rejected. Missing keys keep their defaults.
/// Errors are ConfigError; syntax errors carry "line N" in the message.
SweepSpec parse_config(const std::filesystem::path& path);
SweepSpec parse_config_text(std::string_view text, std::string_view source_name = "<config>");

/// Writes every key explicitly, in the same schema parse_config reads.
std::string serialize_config(const SweepSpec& spec);

}  // namespace tschac::harness
