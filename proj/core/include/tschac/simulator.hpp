#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tschac/config.hpp"
#include "tschac/metrics.hpp"
#include "tschac/mobility.hpp"
#include "tschac/types.hpp"

namespace tschac {

struct SimClock {
    Asn asn = 0;
    double slot_duration_s = 0.010;

    void tick() { ++asn; }
    double elapsed() const { return static_cast<double>(asn) * slot_duration_s; }
};

enum class TraceKind { Join, Desync, Command, Turnaround };

std::string_view to_string(TraceKind kind);

/// Snapshot of a node and its parent at the moment something happened.
struct TraceEvent {
    double time_s = 0.0;
    Asn asn = 0;
    NodeId node = 0;
    TraceKind kind = TraceKind::Join;
    std::optional<SpeedCommand> command;
    std::optional<double> ewma_dbm;
    Vec2 position;
    Vec2 heading;
    Vec2 velocity;  // before any command in this event
    double target_speed = 0.0;
    std::optional<Vec2> peer_position;
    std::optional<Vec2> peer_velocity;
};

struct SimResult {
    SimConfig config;
    std::uint64_t seed = 0;
    Asn slots_executed = 0;
    std::vector<RunMetrics> nodes;  // same order as config.nodes
    std::vector<TraceEvent> trace;  // empty unless requested

    const RunMetrics& node(NodeId id) const;
    const RunMetrics& headline() const;
};

struct RunOptions {
    bool record_trace = false;
};

/// floor(duration / slot_duration), tolerant of binary rounding.
Asn slot_count(const SimConfig& config);

/// Executes one run. Per slot: advance the clock, step mobility on motion-tick
/// boundaries, generate traffic, run every node's MAC action through the radio
/// model, feed parent-originated RSSI to the child's controller, apply its
/// speed commands, then update connectivity and metrics. Same (config, seed)
/// gives a byte-identical `serialize(result)`.
SimResult run(const SimConfig& config, std::uint64_t seed, const RunOptions& options = {});

void to_json(nlohmann::json& j, const SimConfig& config);
void to_json(nlohmann::json& j, const RunMetrics& metrics);
void to_json(nlohmann::json& j, const TraceEvent& event);
void to_json(nlohmann::json& j, const SimResult& result);

/// Canonical JSON text of a result (config echo, metrics, trace).
std::string serialize(const SimResult& result);

}  // namespace tschac
