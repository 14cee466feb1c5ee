#include "tschac/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "tschac/error.hpp"

namespace tschac {

namespace {

bool is_multiple_of(double value, double unit)
{
    const double ratio = value / unit;
    return std::abs(ratio - std::round(ratio)) < 1e-6 && std::round(ratio) >= 1.0;
}

std::string node_field(std::size_t index, const char* key)
{
    return "scenario.nodes[" + std::to_string(index) + "]." + key;
}

}  // namespace

void SimConfig::validate() const
{
    if (!(grid.width > 0.0)) throw ConfigError("scenario.grid_width", "must be > 0");
    if (!(grid.height > 0.0)) throw ConfigError("scenario.grid_height", "must be > 0");
    if (!(duration_s > 0.0)) throw ConfigError("scenario.duration", "must be > 0");
    if (!(slot_duration_s > 0.0)) throw ConfigError("scenario.slot_duration", "must be > 0");
    if (!(motion_tick_s > 0.0) || !is_multiple_of(motion_tick_s, slot_duration_s)) {
        throw ConfigError("scenario.motion_tick", "must be a positive multiple of scenario.slot_duration");
    }
    if (!(traffic_period_s > 0.0) || !is_multiple_of(traffic_period_s, slot_duration_s)) {
        throw ConfigError("scenario.traffic_period", "must be a positive multiple of scenario.slot_duration");
    }
    if (payload_size == 0) throw ConfigError("scenario.payload_size", "must be >= 1");

    radio.validate();
    mac.validate();
    ac.validate();

    if (nodes.size() < 2) throw ConfigError("scenario.nodes", "need a root and at least one child");
    std::set<NodeId> ids;
    std::size_t roots = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (!ids.insert(n.id).second) throw ConfigError(node_field(i, "id"), "duplicate node id");
        if (n.role == NodeRole::Root) {
            ++roots;
            if (n.parent_id) throw ConfigError(node_field(i, "parent"), "the root has no parent");
        } else if (!n.parent_id) {
            throw ConfigError(node_field(i, "parent"), "a child must name its parent");
        }
        if (!(n.base_speed >= 0.0 && n.base_speed <= ac.v_max)) {
            throw ConfigError(node_field(i, "speed"), "must be within [0, ac.v_max]");
        }
        if (!(n.position.x >= 0.0 && n.position.x <= grid.width && n.position.y >= 0.0 &&
              n.position.y <= grid.height)) {
            throw ConfigError(node_field(i, "x"), "initial position outside the grid");
        }
        if (std::abs(norm(n.heading) - 1.0) > 1e-9) {
            throw ConfigError(node_field(i, "heading"), "must be a unit vector");
        }
    }
    if (roots != 1) throw ConfigError("scenario.nodes", "exactly one node must have role root");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (n.parent_id && (!ids.contains(*n.parent_id) || *n.parent_id == n.id)) {
            throw ConfigError(node_field(i, "parent"), "names no other existing node");
        }
    }
}

const NodeSpec& SimConfig::headline_node() const
{
    for (const auto& n : nodes) {
        if (n.role == NodeRole::Child) return n;
    }
    throw ConfigError("scenario.nodes", "no child node");
}

const NodeSpec& SimConfig::node(NodeId id) const
{
    auto it = std::find_if(nodes.begin(), nodes.end(), [id](const NodeSpec& n) { return n.id == id; });
    if (it == nodes.end()) throw ConfigError("scenario.nodes", "unknown node id " + std::to_string(id));
    return *it;
}

std::vector<NodeSpec> default_nodes()
{
    return {
        NodeSpec{0, "A", NodeRole::Root, {130.0, 0.0}, {1.0, 0.0}, 1.0, std::nullopt},
        NodeSpec{1, "B", NodeRole::Child, {0.0, 0.0}, {1.0, 0.0}, 3.0, NodeId{0}},
    };
}

SimConfig default_config()
{
    SimConfig config;
    config.nodes = default_nodes();
    return config;
}

}  // namespace tschac
