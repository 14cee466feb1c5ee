#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "tschac/types.hpp"

namespace tschac {

/// Frequency hopping sequence. The default is Contiki-NG's 16-channel
/// 2.4 GHz order (TSCH_HOPPING_SEQUENCE_16_16).
struct FhsTable {
    std::vector<std::uint8_t> channels;

    static FhsTable default_2_4ghz();
    std::size_t size() const noexcept { return channels.size(); }
    void validate() const;
};

/// channels[(asn + channel_offset) mod |FHS|]
std::uint8_t hop_channel(const FhsTable& fhs, Asn asn, std::uint32_t channel_offset);

enum class CellKind { Minimal, Autonomous, Negotiated };

struct UnicastLink {
    NodeId src;
    NodeId dst;
    friend bool operator==(const UnicastLink&, const UnicastLink&) = default;
};

struct Cell {
    std::uint32_t timeslot = 0;
    std::uint32_t channel_offset = 0;
    CellKind kind = CellKind::Minimal;
    std::optional<UnicastLink> link;  // nullopt: broadcast
};

struct Slotframe {
    std::uint32_t length = 3;
    std::vector<Cell> cells;

    /// Every timeslot < length; no two cells share (timeslot, channel_offset).
    void validate() const;
};

struct ScheduleNode {
    NodeId id;
    std::optional<NodeId> parent;
};

/// Static approximation of the minimal scheduling function: timeslot 0 is the
/// shared Minimal cell (broadcast, offset 0); each child k gets an Autonomous
/// uplink cell at 1 + 2k and an Autonomous downlink cell at 2 + 2k, both on
/// offset 1. A single child therefore yields the 3-slot frame.
Slotframe build_minimal_schedule(std::span<const ScheduleNode> nodes);

struct MacParams {
    double eb_period_s = 4.0;
    double keepalive_timeout_s = 10.0;
    std::uint32_t max_retries = 8;
    std::size_t queue_capacity = 16;
    FhsTable fhs = FhsTable::default_2_4ghz();

    void validate() const;
};

enum class FrameType { EnhancedBeacon, Data, Ack };

struct Frame {
    FrameType type = FrameType::EnhancedBeacon;
    NodeId src = 0;
    std::optional<NodeId> dst;
    std::uint64_t seq = 0;
    std::uint32_t payload_size = 0;
};

struct DataFrame {
    std::uint64_t seq = 0;
    std::uint32_t payload_size = 0;
    Asn enqueue_asn = 0;
    std::uint32_t retries = 0;
};

struct MacCounters {
    std::uint64_t generated = 0;
    std::uint64_t dropped_queue_full = 0;
    std::uint64_t dropped_retries = 0;
    std::uint64_t acked = 0;
    std::uint64_t tx_attempts = 0;
    std::uint64_t eb_sent = 0;
    std::uint64_t joins = 0;
    std::uint64_t desyncs = 0;
};

struct MacState {
    bool joined = false;
    std::optional<NodeId> time_source;
    Asn last_heard_asn = 0;
    std::optional<Asn> first_join_asn;
    std::optional<Asn> last_eb_asn;
    std::deque<DataFrame> tx_queue;
    std::vector<std::uint64_t> dropped_seqs;  // frames abandoned after max_retries
    std::uint64_t next_seq = 0;
    MacCounters counters;
};

enum class ActionKind { TransmitEB, TransmitData, Listen, Sleep };

struct SlotAction {
    ActionKind kind = ActionKind::Sleep;
    std::uint8_t channel = 0;
    std::uint32_t timeslot = 0;
    std::uint32_t channel_offset = 0;
    std::optional<Frame> frame;  // set for both transmit kinds
};

enum class Connectivity { Connected, Disconnected };

/// Everything the surrounding simulation needs to react to after a reception.
struct MacEvents {
    bool joined_now = false;
    bool send_ack = false;             // ACK this data frame in the same slot
    std::optional<Frame> delivered;    // data frame addressed to this node
    bool acked_head = false;           // our head-of-queue frame left the queue
    std::optional<double> link_rssi;   // rssi of any frame, for link monitoring
};

/// Per-node TSCH link layer. The root is born joined and acts as coordinator;
/// children join on the first EB received from their configured parent.
class TschMac {
public:
    struct Identity {
        NodeId id = 0;
        std::optional<NodeId> parent;  // nullopt: coordinator
        std::uint32_t eb_turn = 0;     // index among all nodes
        std::uint32_t eb_turn_count = 1;
    };

    TschMac(Identity identity, MacParams params, const Slotframe& slotframe, double slot_duration_s);

    /// What this node does in the slot. Minimal cells carry EBs; joined nodes
    /// take turns by slotframe iteration (iteration mod eb_turn_count) so two
    /// EBs never share the cell, and send one once eb_period has elapsed.
    /// Unjoined nodes only ever listen, on the offset-0 hop channel.
    SlotAction slot_action(Asn asn) const;

    /// Bookkeeping for frames this node actually put on air.
    void on_transmitted(const SlotAction& action, Asn asn);

    MacEvents on_frame_received(const Frame& frame, double rssi_dbm, Asn asn);

    /// Outcome of a data transmission: whether the ACK made it back.
    /// Unacknowledged frames are retried up to max_retries, then dropped.
    void on_data_outcome(std::uint64_t seq, bool acked);

    /// Keepalive rule. A node that has not heard its time source for more than
    /// keepalive_timeout leaves the network (first_join_asn is retained).
    Connectivity check_connectivity(Asn asn);

    /// Appends an application frame; unjoined nodes enqueue too. Returns false
    /// and counts a drop when the queue is full.
    bool enqueue_app_frame(std::uint32_t payload_size, Asn asn);

    const MacState& state() const noexcept { return state_; }
    const Identity& identity() const noexcept { return identity_; }
    const MacParams& params() const noexcept { return params_; }
    bool is_coordinator() const noexcept { return !identity_.parent.has_value(); }

private:
    Identity identity_;
    MacParams params_;
    std::uint32_t slotframe_length_;
    std::vector<std::optional<Cell>> own_cells_;  // by timeslot; cells this node uses
    Asn eb_period_slots_;
    Asn keepalive_slots_;
    MacState state_;
};

/// Free-function form of the keepalive rule, usable without a TschMac.
Connectivity check_connectivity(MacState& state, Asn asn, Asn keepalive_slots);

/// Number of whole slots in `seconds`, tolerant of binary rounding (10.0 / 0.01).
Asn seconds_to_slots(double seconds, double slot_duration_s);

}  // namespace tschac
