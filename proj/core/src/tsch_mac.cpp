#include "tschac/tsch_mac.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "tschac/error.hpp"

namespace tschac {

FhsTable FhsTable::default_2_4ghz()
{
    return FhsTable{{16, 17, 23, 18, 26, 15, 25, 22, 19, 11, 12, 13, 24, 14, 20, 21}};
}

void FhsTable::validate() const
{
    if (channels.empty()) throw ConfigError("mac.fhs", "must not be empty");
    for (auto c : channels) {
        if (c < 11 || c > 26) {
            throw ConfigError("mac.fhs", "channel " + std::to_string(c) + " outside 11..26");
        }
    }
}

std::uint8_t hop_channel(const FhsTable& fhs, Asn asn, std::uint32_t channel_offset)
{
    const auto n = static_cast<Asn>(fhs.channels.size());
    // (asn + co) mod n without overflowing near the top of the ASN range.
    const Asn index = (asn % n + channel_offset % n) % n;
    return fhs.channels[static_cast<std::size_t>(index)];
}

void Slotframe::validate() const
{
    if (length == 0) throw ConfigError("mac.slotframe", "length must be > 0");
    std::set<std::pair<std::uint32_t, std::uint32_t>> used;
    for (const auto& cell : cells) {
        if (cell.timeslot >= length) {
            throw ConfigError("mac.slotframe", "timeslot " + std::to_string(cell.timeslot) + " >= length");
        }
        if (!used.emplace(cell.timeslot, cell.channel_offset).second) {
            throw ConfigError("mac.slotframe", "two cells share timeslot " + std::to_string(cell.timeslot) +
                                                   " offset " + std::to_string(cell.channel_offset));
        }
    }
}

Slotframe build_minimal_schedule(std::span<const ScheduleNode> nodes)
{
    std::vector<const ScheduleNode*> children;
    for (const auto& n : nodes) {
        if (n.parent) children.push_back(&n);
    }
    Slotframe frame;
    frame.length = std::max<std::uint32_t>(3, 1 + 2 * static_cast<std::uint32_t>(children.size()));
    frame.cells.push_back(Cell{0, 0, CellKind::Minimal, std::nullopt});
    for (std::uint32_t k = 0; k < children.size(); ++k) {
        const auto& child = *children[k];
        frame.cells.push_back(Cell{1 + 2 * k, 1, CellKind::Autonomous, UnicastLink{child.id, *child.parent}});
        frame.cells.push_back(Cell{2 + 2 * k, 1, CellKind::Autonomous, UnicastLink{*child.parent, child.id}});
    }
    return frame;
}

void MacParams::validate() const
{
    if (!(eb_period_s > 0.0)) throw ConfigError("mac.eb_period", "must be > 0");
    if (!(keepalive_timeout_s > eb_period_s)) throw ConfigError("mac.keepalive_timeout", "must be > mac.eb_period");
    if (queue_capacity == 0) throw ConfigError("mac.queue_capacity", "must be >= 1");
    fhs.validate();
}

Asn seconds_to_slots(double seconds, double slot_duration_s)
{
    return static_cast<Asn>(std::floor(seconds / slot_duration_s + 1e-9));
}

TschMac::TschMac(Identity identity, MacParams params, const Slotframe& slotframe, double slot_duration_s)
    : identity_(identity),
      params_(std::move(params)),
      slotframe_length_(slotframe.length),
      own_cells_(slotframe.length),
      eb_period_slots_(seconds_to_slots(params_.eb_period_s, slot_duration_s)),
      keepalive_slots_(seconds_to_slots(params_.keepalive_timeout_s, slot_duration_s))
{
    slotframe.validate();
    for (const auto& cell : slotframe.cells) {
        const bool mine = cell.kind == CellKind::Minimal ||
                          (cell.link && (cell.link->src == identity_.id || cell.link->dst == identity_.id));
        if (mine && !own_cells_[cell.timeslot]) own_cells_[cell.timeslot] = cell;
    }
    if (is_coordinator()) {
        state_.joined = true;
        state_.first_join_asn = 0;
        state_.counters.joins = 1;
    }
}

SlotAction TschMac::slot_action(Asn asn) const
{
    SlotAction action;
    action.timeslot = static_cast<std::uint32_t>(asn % slotframe_length_);

    if (!state_.joined) {
        action.kind = ActionKind::Listen;
        action.channel_offset = 0;
        action.channel = hop_channel(params_.fhs, asn, 0);
        return action;
    }

    if (!own_cells_[action.timeslot]) {
        action.kind = ActionKind::Sleep;
        return action;
    }
    const Cell& cell = *own_cells_[action.timeslot];
    action.channel_offset = cell.channel_offset;
    action.channel = hop_channel(params_.fhs, asn, cell.channel_offset);

    if (cell.kind == CellKind::Minimal) {
        const Asn iteration = asn / slotframe_length_;
        const bool my_turn = iteration % identity_.eb_turn_count == identity_.eb_turn;
        const bool due = !state_.last_eb_asn || asn - *state_.last_eb_asn >= eb_period_slots_;
        if (my_turn && due) {
            action.kind = ActionKind::TransmitEB;
            action.frame = Frame{FrameType::EnhancedBeacon, identity_.id, std::nullopt, 0, 0};
        } else {
            action.kind = ActionKind::Listen;
        }
        return action;
    }

    if (cell.link && cell.link->src == identity_.id) {
        if (state_.tx_queue.empty()) {
            action.kind = ActionKind::Sleep;
        } else {
            const auto& head = state_.tx_queue.front();
            action.kind = ActionKind::TransmitData;
            action.frame = Frame{FrameType::Data, identity_.id, cell.link->dst, head.seq, head.payload_size};
        }
        return action;
    }
    if (cell.link && cell.link->dst == identity_.id) {
        action.kind = ActionKind::Listen;
        return action;
    }
    action.kind = ActionKind::Sleep;
    return action;
}

void TschMac::on_transmitted(const SlotAction& action, Asn asn)
{
    if (action.kind == ActionKind::TransmitEB) {
        state_.last_eb_asn = asn;
        ++state_.counters.eb_sent;
    } else if (action.kind == ActionKind::TransmitData) {
        ++state_.counters.tx_attempts;
    }
}

MacEvents TschMac::on_frame_received(const Frame& frame, double rssi_dbm, Asn asn)
{
    MacEvents events;
    events.link_rssi = rssi_dbm;

    if (frame.type == FrameType::EnhancedBeacon && !state_.joined && !is_coordinator() &&
        frame.src == identity_.parent) {
        state_.joined = true;
        state_.time_source = frame.src;
        state_.last_heard_asn = asn;
        if (!state_.first_join_asn) state_.first_join_asn = asn;
        ++state_.counters.joins;
        events.joined_now = true;
    }

    if (state_.joined && state_.time_source == frame.src) {
        state_.last_heard_asn = asn;
    }

    switch (frame.type) {
    case FrameType::Data:
        if (frame.dst == identity_.id) {
            events.delivered = frame;
            events.send_ack = true;
        }
        break;
    case FrameType::Ack:
        if (frame.dst == identity_.id && !state_.tx_queue.empty() && state_.tx_queue.front().seq == frame.seq) {
            state_.tx_queue.pop_front();
            ++state_.counters.acked;
            events.acked_head = true;
        }
        break;
    case FrameType::EnhancedBeacon:
        break;
    }
    return events;
}

void TschMac::on_data_outcome(std::uint64_t seq, bool acked)
{
    if (acked || state_.tx_queue.empty() || state_.tx_queue.front().seq != seq) {
        return;
    }
    auto& head = state_.tx_queue.front();
    if (++head.retries > params_.max_retries) {
        state_.dropped_seqs.push_back(head.seq);
        state_.tx_queue.pop_front();
        ++state_.counters.dropped_retries;
    }
}

Connectivity check_connectivity(MacState& state, Asn asn, Asn keepalive_slots)
{
    if (!state.joined) return Connectivity::Disconnected;
    if (asn > state.last_heard_asn && asn - state.last_heard_asn > keepalive_slots) {
        state.joined = false;
        state.time_source.reset();
        ++state.counters.desyncs;
        return Connectivity::Disconnected;
    }
    return Connectivity::Connected;
}

Connectivity TschMac::check_connectivity(Asn asn)
{
    if (is_coordinator()) return Connectivity::Connected;
    return tschac::check_connectivity(state_, asn, keepalive_slots_);
}

bool TschMac::enqueue_app_frame(std::uint32_t payload_size, Asn asn)
{
    ++state_.counters.generated;
    if (state_.tx_queue.size() >= params_.queue_capacity) {
        ++state_.counters.dropped_queue_full;
        return false;
    }
    state_.tx_queue.push_back(DataFrame{state_.next_seq++, payload_size, asn, 0});
    return true;
}

}  // namespace tschac
