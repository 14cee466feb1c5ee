#include "tschac/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>

#include <nlohmann/json.hpp>

#include "tschac/active_connectivity.hpp"
#include "tschac/error.hpp"
#include "tschac/radio_model.hpp"
#include "tschac/rng.hpp"
#include "tschac/tsch_mac.hpp"

namespace tschac {

std::string_view to_string(TraceKind kind)
{
    switch (kind) {
    case TraceKind::Join: return "join";
    case TraceKind::Desync: return "desync";
    case TraceKind::Command: return "command";
    case TraceKind::Turnaround: return "turnaround";
    }
    return "?";
}

const RunMetrics& SimResult::node(NodeId id) const
{
    for (const auto& m : nodes) {
        if (m.node == id) return m;
    }
    throw SimulationError("no metrics for node " + std::to_string(id));
}

const RunMetrics& SimResult::headline() const
{
    return node(config.headline_node().id);
}

Asn slot_count(const SimConfig& config)
{
    return seconds_to_slots(config.duration_s, config.slot_duration_s);
}

namespace {

struct NodeRuntime {
    const NodeSpec* spec;
    MotionState motion;
    TschMac mac;
    std::optional<ConnectivityController> controller;
    RngStream radio_rng;  // shadowing and acceptance draws for frames this node receives
    std::optional<std::size_t> parent;
    std::unordered_set<std::uint64_t> delivered_seqs;  // this node's frames that reached the root
    std::uint64_t delivered_bytes = 0;
    std::uint64_t speed_commands = 0;
    Asn slots_after_join = 0;
    Asn slots_disconnected = 0;
    Asn motion_asn = 0;  // motion state is valid at the start of this slot
};

class Simulation {
public:
    Simulation(const SimConfig& config, std::uint64_t seed, const RunOptions& options)
        : config_(config), seed_(seed), options_(options)
    {
        std::vector<ScheduleNode> schedule_nodes;
        for (const auto& n : config_.nodes) schedule_nodes.push_back(ScheduleNode{n.id, n.parent_id});
        const Slotframe slotframe = build_minimal_schedule(schedule_nodes);

        nodes_.reserve(config_.nodes.size());
        for (std::size_t i = 0; i < config_.nodes.size(); ++i) {
            const NodeSpec& spec = config_.nodes[i];
            index_[spec.id] = i;

            MotionState motion;
            motion.position = spec.position;
            motion.heading = spec.heading;
            motion.speed = spec.base_speed;
            motion.target_speed = spec.base_speed;
            motion.base_speed = spec.base_speed;
            motion.accel = config_.ac.accel;
            motion.decel = config_.ac.decel;
            motion.v_max = config_.ac.v_max;

            TschMac::Identity identity{spec.id, spec.parent_id, static_cast<std::uint32_t>(i),
                                       static_cast<std::uint32_t>(config_.nodes.size())};
            const std::string id = std::to_string(spec.id);

            std::optional<ConnectivityController> controller;
            if (spec.role == NodeRole::Child) {
                controller.emplace(config_.ac_mode, config_.ac, make_rng(seed_, "acr/" + id));
            }
            nodes_.push_back(NodeRuntime{&spec, motion,
                                         TschMac(identity, config_.mac, slotframe, config_.slot_duration_s),
                                         std::move(controller), make_rng(seed_, "radio/" + id), std::nullopt, {}});
        }
        for (auto& n : nodes_) {
            if (n.spec->parent_id) n.parent = index_.at(*n.spec->parent_id);
        }
    }

    SimResult run()
    {
        const Asn total_slots = slot_count(config_);
        const Asn tick_slots = seconds_to_slots(config_.motion_tick_s, config_.slot_duration_s);
        const Asn traffic_slots = seconds_to_slots(config_.traffic_period_s, config_.slot_duration_s);

        std::vector<SlotAction> actions(nodes_.size());
        for (Asn asn = 0; asn < total_slots; ++asn) {
            clock_.asn = asn;

            if (asn > 0 && asn % tick_slots == 0) {
                for (auto& n : nodes_) advance_motion(n, asn);
            }

            if (asn % traffic_slots == 0) {
                for (auto& n : nodes_) {
                    if (n.spec->role == NodeRole::Child) n.mac.enqueue_app_frame(config_.payload_size, asn);
                }
            }

            for (std::size_t i = 0; i < nodes_.size(); ++i) actions[i] = nodes_[i].mac.slot_action(asn);
            check_exclusivity(actions, asn);
            for (std::size_t i = 0; i < nodes_.size(); ++i) {
                if (actions[i].kind == ActionKind::TransmitEB) transmit_beacon(i, actions, asn);
                if (actions[i].kind == ActionKind::TransmitData) transmit_data(i, actions, asn);
            }

            for (auto& n : nodes_) {
                const bool was_joined = n.mac.state().joined;
                const Connectivity c = n.mac.check_connectivity(asn);
                if (was_joined && !n.mac.state().joined) record(TraceKind::Desync, n, std::nullopt);
                if (n.mac.state().first_join_asn) {
                    ++n.slots_after_join;
                    if (c == Connectivity::Disconnected) ++n.slots_disconnected;
                }
            }
        }

        // Cover the tail after the last tick boundary so odometers span [0, duration].
        clock_.asn = total_slots;
        for (auto& n : nodes_) advance_motion(n, total_slots);

        SimResult result;
        result.config = config_;
        result.seed = seed_;
        result.slots_executed = total_slots;
        result.trace = std::move(trace_);
        for (const auto& n : nodes_) result.nodes.push_back(collect(n, total_slots));
        return result;
    }

private:
    /// Brings one node's motion forward to the start of slot `asn`.
    void advance_motion(NodeRuntime& n, Asn asn)
    {
        if (asn <= n.motion_asn) return;
        const double dt = static_cast<double>(asn - n.motion_asn) * config_.slot_duration_s;
        n.motion_asn = asn;
        const Vec2 before = n.motion.heading;
        n.motion = bounce(step(n.motion, dt), config_.grid);
        if (!(n.motion.heading == before)) record(TraceKind::Turnaround, n, std::nullopt);
    }

    void check_exclusivity(const std::vector<SlotAction>& actions, Asn asn) const
    {
        std::set<std::pair<std::uint32_t, std::uint32_t>> busy;
        for (const auto& a : actions) {
            if (a.kind != ActionKind::TransmitEB && a.kind != ActionKind::TransmitData) continue;
            if (!busy.emplace(a.timeslot, a.channel_offset).second) {
                throw SimulationError("two transmitters share a cell at asn " + std::to_string(asn));
            }
        }
    }

    double link_distance(std::size_t a, std::size_t b) const
    {
        return distance(nodes_[a].motion.position, nodes_[b].motion.position);
    }

    void transmit_beacon(std::size_t tx, const std::vector<SlotAction>& actions, Asn asn)
    {
        nodes_[tx].mac.on_transmitted(actions[tx], asn);
        for (std::size_t rx = 0; rx < nodes_.size(); ++rx) {
            if (rx == tx || actions[rx].kind != ActionKind::Listen || actions[rx].channel != actions[tx].channel) {
                continue;
            }
            if (auto frame = try_receive(config_.radio, link_distance(tx, rx), nodes_[rx].radio_rng)) {
                auto events = nodes_[rx].mac.on_frame_received(*actions[tx].frame, frame->rssi_dbm, asn);
                handle_events(rx, tx, events);
            }
        }
    }

    void transmit_data(std::size_t tx, const std::vector<SlotAction>& actions, Asn asn)
    {
        const Frame& data = *actions[tx].frame;
        nodes_[tx].mac.on_transmitted(actions[tx], asn);
        bool acked = false;

        const std::size_t rx = index_.at(*data.dst);
        if (actions[rx].kind == ActionKind::Listen && actions[rx].channel == actions[tx].channel) {
            if (auto frame = try_receive(config_.radio, link_distance(tx, rx), nodes_[rx].radio_rng)) {
                auto events = nodes_[rx].mac.on_frame_received(data, frame->rssi_dbm, asn);
                handle_events(rx, tx, events);
                if (events.send_ack) {
                    const Frame ack{FrameType::Ack, nodes_[rx].spec->id, data.src, data.seq, 0};
                    if (auto back = try_receive(config_.radio, link_distance(tx, rx), nodes_[tx].radio_rng)) {
                        auto ack_events = nodes_[tx].mac.on_frame_received(ack, back->rssi_dbm, asn);
                        handle_events(tx, rx, ack_events);
                        acked = ack_events.acked_head;
                    }
                }
            }
        }
        nodes_[tx].mac.on_data_outcome(data.seq, acked);
    }

    void handle_events(std::size_t rx, std::size_t from, const MacEvents& events)
    {
        NodeRuntime& node = nodes_[rx];
        if (events.joined_now) record(TraceKind::Join, node, std::nullopt);

        if (events.delivered) {
            NodeRuntime& source = nodes_[index_.at(events.delivered->src)];
            if (source.delivered_seqs.insert(events.delivered->seq).second) {
                source.delivered_bytes += events.delivered->payload_size;
            }
        }

        // Link monitoring: only frames the child hears from its parent count.
        if (events.link_rssi && node.controller && node.parent == from) {
            // Positions at this exact slot; exact because step() is exact for ramps.
            advance_motion(node, clock_.asn);
            advance_motion(nodes_[from], clock_.asn);
            const SampleContext context{clock_.elapsed(), node.motion.position, node.motion.heading,
                                        nodes_[from].motion.position};
            if (auto command = node.controller->on_sample(*events.link_rssi, context)) {
                // The new target applies from this slot on, not from the last tick.
                const MotionState before = node.motion;
                node.motion = command_speed(node.motion, *command);
                ++node.speed_commands;
                record(TraceKind::Command, node, command, &before);
            }
        }
    }

    void record(TraceKind kind, const NodeRuntime& node, std::optional<SpeedCommand> command,
                const MotionState* before = nullptr)
    {
        if (!options_.record_trace) return;
        const MotionState& m = before ? *before : node.motion;
        TraceEvent e;
        e.time_s = clock_.elapsed();
        e.asn = clock_.asn;
        e.node = node.spec->id;
        e.kind = kind;
        e.command = command;
        if (node.controller) e.ewma_dbm = node.controller->state().ewma;
        e.position = m.position;
        e.heading = m.heading;
        e.velocity = m.velocity();
        e.target_speed = node.motion.target_speed;
        if (node.parent) {
            e.peer_position = nodes_[*node.parent].motion.position;
            e.peer_velocity = nodes_[*node.parent].motion.velocity();
        }
        trace_.push_back(e);
    }

    RunMetrics collect(const NodeRuntime& n, Asn total_slots) const
    {
        const auto& st = n.mac.state();
        RunMetrics m;
        m.node = n.spec->id;
        m.name = n.spec->name;
        m.payload_size = config_.payload_size;
        m.duration_s = static_cast<double>(total_slots) * config_.slot_duration_s;
        m.generated_frames = st.counters.generated;
        m.delivered_frames = n.delivered_seqs.size();
        m.delivered_payload_bytes = n.delivered_bytes;
        m.acked_frames = st.counters.acked;
        m.dropped_queue_full = st.counters.dropped_queue_full;
        m.dropped_retries = st.counters.dropped_retries;
        for (auto seq : st.dropped_seqs) m.dropped_retries_delivered += n.delivered_seqs.contains(seq) ? 1 : 0;
        m.in_queue_at_end = st.tx_queue.size();
        for (const auto& f : st.tx_queue) m.in_queue_delivered += n.delivered_seqs.contains(f.seq) ? 1 : 0;
        if (st.first_join_asn) m.first_join_time_s = static_cast<double>(*st.first_join_asn) * config_.slot_duration_s;
        m.total_time_after_first_join_s = static_cast<double>(n.slots_after_join) * config_.slot_duration_s;
        m.disconnected_time_after_first_join_s = static_cast<double>(n.slots_disconnected) * config_.slot_duration_s;
        m.disconnections = st.counters.desyncs;
        m.odometer_m = n.motion.odometer;
        m.speed_commands = n.speed_commands;
        return m;
    }

    const SimConfig& config_;
    std::uint64_t seed_;
    RunOptions options_;
    SimClock clock_;
    std::vector<NodeRuntime> nodes_;
    std::map<NodeId, std::size_t> index_;
    std::vector<TraceEvent> trace_;
};

}  // namespace

SimResult run(const SimConfig& config, std::uint64_t seed, const RunOptions& options)
{
    config.validate();
    Simulation sim(config, seed, options);
    SimResult result = sim.run();
    return result;
}

namespace {

nlohmann::json vec(Vec2 v)
{
    return nlohmann::json::array({v.x, v.y});
}

std::string_view to_string(SpeedCommandKind kind)
{
    switch (kind) {
    case SpeedCommandKind::Accelerate: return "accelerate";
    case SpeedCommandKind::Decelerate: return "decelerate";
    case SpeedCommandKind::RestoreBase: return "restore_base";
    }
    return "?";
}

}  // namespace

void to_json(nlohmann::json& j, const SimConfig& c)
{
    j = nlohmann::json::object();
    j["grid"] = {c.grid.width, c.grid.height};
    j["duration_s"] = c.duration_s;
    j["slot_duration_s"] = c.slot_duration_s;
    j["motion_tick_s"] = c.motion_tick_s;
    j["traffic_period_s"] = c.traffic_period_s;
    j["payload_size"] = c.payload_size;
    j["ac_mode"] = to_string(c.ac_mode);
    auto& nodes = j["nodes"] = nlohmann::json::array();
    for (const auto& n : c.nodes) {
        nlohmann::json node{{"id", n.id},
                            {"name", n.name},
                            {"role", n.role == NodeRole::Root ? "root" : "child"},
                            {"position", vec(n.position)},
                            {"heading", vec(n.heading)},
                            {"speed", n.base_speed}};
        if (n.parent_id) node["parent"] = *n.parent_id;
        nodes.push_back(std::move(node));
    }
    j["radio"] = {{"tx_power", c.radio.tx_power_dbm},     {"pl0", c.radio.pl0_db},
                  {"d0", c.radio.d0_m},                   {"eta", c.radio.eta},
                  {"shadow_sigma", c.radio.shadow_sigma_db}, {"rssi_50", c.radio.rssi50_dbm},
                  {"logistic_width", c.radio.logistic_width_db}, {"max_range", c.radio.max_range_m},
                  {"rssi_floor", c.radio.rssi_floor_dbm}};
    j["mac"] = {{"eb_period", c.mac.eb_period_s},
                {"keepalive_timeout", c.mac.keepalive_timeout_s},
                {"max_retries", c.mac.max_retries},
                {"queue_capacity", c.mac.queue_capacity},
                {"fhs", c.mac.fhs.channels}};
    j["ac"] = {{"alpha", c.ac.alpha}, {"t_min", c.ac.t_min_dbm}, {"t_max", c.ac.t_max_dbm},
               {"v_min", c.ac.v_min}, {"v_max", c.ac.v_max},     {"accel", c.ac.accel},
               {"decel", c.ac.decel}, {"acr_eval_window", c.ac.acr_eval_window_s}};
}

void to_json(nlohmann::json& j, const RunMetrics& m)
{
    j = {{"node", m.node},
         {"name", m.name},
         {"generated_frames", m.generated_frames},
         {"delivered_frames", m.delivered_frames},
         {"delivered_payload_bytes", m.delivered_payload_bytes},
         {"acked_frames", m.acked_frames},
         {"dropped_queue_full", m.dropped_queue_full},
         {"dropped_retries", m.dropped_retries},
         {"dropped_retries_delivered", m.dropped_retries_delivered},
         {"in_queue_at_end", m.in_queue_at_end},
         {"in_queue_delivered", m.in_queue_delivered},
         {"disconnected_time_after_first_join_s", m.disconnected_time_after_first_join_s},
         {"total_time_after_first_join_s", m.total_time_after_first_join_s},
         {"disconnections", m.disconnections},
         {"odometer_m", m.odometer_m},
         {"speed_commands", m.speed_commands},
         {"duration_s", m.duration_s},
         {"throughput_bps", throughput_bps(m)},
         {"downtime_pct", downtime_pct(m)},
         {"distance_km_h", distance_km_per_h(m)}};
    j["first_join_time_s"] = m.first_join_time_s ? nlohmann::json(*m.first_join_time_s) : nlohmann::json(nullptr);
}

void to_json(nlohmann::json& j, const TraceEvent& e)
{
    j = {{"time_s", e.time_s},
         {"asn", e.asn},
         {"node", e.node},
         {"kind", to_string(e.kind)},
         {"position", vec(e.position)},
         {"heading", vec(e.heading)},
         {"velocity", vec(e.velocity)},
         {"target_speed", e.target_speed}};
    if (e.command) j["command"] = {{"kind", to_string(e.command->kind)}, {"to", e.command->to}};
    if (e.ewma_dbm) j["ewma_dbm"] = *e.ewma_dbm;
    if (e.peer_position) j["peer_position"] = vec(*e.peer_position);
    if (e.peer_velocity) j["peer_velocity"] = vec(*e.peer_velocity);
}

void to_json(nlohmann::json& j, const SimResult& r)
{
    j = {{"config", r.config}, {"seed", r.seed}, {"slots_executed", r.slots_executed},
         {"nodes", r.nodes},   {"trace", r.trace}};
}

std::string serialize(const SimResult& result)
{
    return nlohmann::json(result).dump(2);
}

}  // namespace tschac
