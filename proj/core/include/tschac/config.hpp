#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tschac/active_connectivity.hpp"
#include "tschac/radio_model.hpp"
#include "tschac/tsch_mac.hpp"
#include "tschac/types.hpp"

namespace tschac {

enum class NodeRole { Root, Child };

struct NodeSpec {
    NodeId id = 0;
    std::string name;
    NodeRole role = NodeRole::Child;
    Vec2 position;
    Vec2 heading{1.0, 0.0};
    double base_speed = 0.0;
    std::optional<NodeId> parent_id;
};

struct SimConfig {
    Grid grid;
    double duration_s = 1800.0;
    double slot_duration_s = 0.010;
    double motion_tick_s = 0.100;
    double traffic_period_s = 5.0;
    std::uint32_t payload_size = 21;
    std::vector<NodeSpec> nodes;
    RadioParams radio;
    MacParams mac;
    AcParams ac;
    AcMode ac_mode = AcMode::Off;

    /// Throws ConfigError naming the first offending field.
    void validate() const;

    /// First child in node order; the node the headline metrics describe.
    const NodeSpec& headline_node() const;
    const NodeSpec& node(NodeId id) const;
};

/// Two robots on one lane, both heading +x: root A at x=130 m moving at 1 m/s,
/// child B at x=0 moving at 3 m/s, everything else at its documented default.
std::vector<NodeSpec> default_nodes();
SimConfig default_config();

}  // namespace tschac
