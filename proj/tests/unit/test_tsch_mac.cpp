#include <gtest/gtest.h>

#include <map>
#include <set>

#include "tschac/error.hpp"
#include "tschac/tsch_mac.hpp"

using namespace tschac;

namespace {

constexpr double kSlot = 0.01;

Slotframe one_child_frame()
{
    const std::vector<ScheduleNode> nodes{{0, std::nullopt}, {1, 0}};
    return build_minimal_schedule(nodes);
}

TschMac root_mac() { return TschMac({0, std::nullopt, 0, 2}, MacParams{}, one_child_frame(), kSlot); }
TschMac child_mac() { return TschMac({1, 0, 1, 2}, MacParams{}, one_child_frame(), kSlot); }

Frame eb_from(NodeId src) { return Frame{FrameType::EnhancedBeacon, src, std::nullopt, 0, 0}; }

}  // namespace

TEST(HopChannel, WorkedExamples)
{
    const FhsTable fhs{{15, 20, 25, 26}};
    EXPECT_EQ(hop_channel(fhs, 0, 0), 15);
    EXPECT_EQ(hop_channel(fhs, 5, 1), 25);
}

TEST(HopChannel, Periodic)
{
    const auto fhs = FhsTable::default_2_4ghz();
    for (Asn k = 0; k < 200; ++k) {
        for (std::uint32_t m = 0; m < 16; ++m) EXPECT_EQ(hop_channel(fhs, k, m), hop_channel(fhs, k + fhs.size(), m));
    }
}

TEST(HopChannel, LargeAsnDoesNotOverflow)
{
    const FhsTable fhs{{11, 12, 13}};
    const Asn asn = std::numeric_limits<Asn>::max();
    // 2^64 - 1 = 0 (mod 3), so index (0 + 2) mod 3 = 2; naive asn + co would wrap to 1
    EXPECT_EQ(hop_channel(fhs, asn, 2), 13);
}

TEST(HopChannel, CoverageOverFhsIterations)
{
    const auto fhs = FhsTable::default_2_4ghz();
    const Slotframe frame = one_child_frame();
    for (const auto& cell : frame.cells) {
        std::map<std::uint8_t, int> visits;
        for (Asn iter = 0; iter < fhs.size(); ++iter) {
            for (std::uint32_t ts = 0; ts < frame.length; ++ts) {
                if (ts == cell.timeslot) ++visits[hop_channel(fhs, iter * frame.length + ts, cell.channel_offset)];
            }
        }
        // gcd(3, 16) = 1, so one cell walks the whole sequence once
        EXPECT_EQ(visits.size(), fhs.size());
        for (const auto& [ch, n] : visits) EXPECT_EQ(n, 1) << int(ch);
    }
}

TEST(FhsTable, DefaultIsSixteenDistinctChannels)
{
    const auto fhs = FhsTable::default_2_4ghz();
    EXPECT_EQ(fhs.size(), 16u);
    EXPECT_EQ(std::set<std::uint8_t>(fhs.channels.begin(), fhs.channels.end()).size(), 16u);
    EXPECT_NO_THROW(fhs.validate());
    EXPECT_THROW((FhsTable{{}}).validate(), ConfigError);
    EXPECT_THROW((FhsTable{{10}}).validate(), ConfigError);
}

TEST(Slotframe, MinimalScheduleShape)
{
    const Slotframe frame = one_child_frame();
    EXPECT_EQ(frame.length, 3u);
    ASSERT_EQ(frame.cells.size(), 3u);
    EXPECT_EQ(frame.cells[0].kind, CellKind::Minimal);
    EXPECT_EQ(frame.cells[0].channel_offset, 0u);
    EXPECT_FALSE(frame.cells[0].link);
    EXPECT_EQ(frame.cells[1].link, (UnicastLink{1, 0}));
    EXPECT_EQ(frame.cells[1].channel_offset, 1u);
    EXPECT_EQ(frame.cells[2].link, (UnicastLink{0, 1}));
    EXPECT_NO_THROW(frame.validate());
}

TEST(Slotframe, GrowsWithChildren)
{
    const std::vector<ScheduleNode> nodes{{0, std::nullopt}, {1, 0}, {2, 0}, {3, 1}};
    const Slotframe frame = build_minimal_schedule(nodes);
    EXPECT_EQ(frame.length, 7u);
    EXPECT_NO_THROW(frame.validate());
}

TEST(Slotframe, ValidateRejectsCollisionsAndOutOfRange)
{
    Slotframe frame = one_child_frame();
    frame.cells.push_back(frame.cells[1]);
    EXPECT_THROW(frame.validate(), ConfigError);
    frame = one_child_frame();
    frame.cells.push_back({5, 0, CellKind::Negotiated, UnicastLink{1, 0}});
    EXPECT_THROW(frame.validate(), ConfigError);
}

TEST(TschMac, UnjoinedNodeOnlyListens)
{
    const auto mac = child_mac();
    const auto fhs = FhsTable::default_2_4ghz();
    for (Asn asn = 0; asn < 300; ++asn) {
        const auto a = mac.slot_action(asn);
        EXPECT_EQ(a.kind, ActionKind::Listen);
        EXPECT_EQ(a.channel, hop_channel(fhs, asn, 0));
    }
}

TEST(TschMac, RootBornJoinedSendsFirstEbInItsTurn)
{
    auto mac = root_mac();
    EXPECT_TRUE(mac.state().joined);
    EXPECT_EQ(mac.state().first_join_asn, Asn{0});
    const auto a = mac.slot_action(0);
    EXPECT_EQ(a.kind, ActionKind::TransmitEB);
    mac.on_transmitted(a, 0);
    // next minimal cell is another node's turn; after that the period has not elapsed
    EXPECT_EQ(mac.slot_action(3).kind, ActionKind::Listen);
    EXPECT_EQ(mac.slot_action(6).kind, ActionKind::Listen);
    // 4 s = 400 slots; iteration 134 (asn 402) is even, so it is the root's turn again
    EXPECT_EQ(mac.slot_action(402).kind, ActionKind::TransmitEB);
}

TEST(TschMac, JoinOnEbFromParent)
{
    auto mac = child_mac();
    auto ev = mac.on_frame_received(eb_from(0), -80.0, 1234);
    EXPECT_TRUE(ev.joined_now);
    EXPECT_TRUE(mac.state().joined);
    EXPECT_EQ(mac.state().time_source, NodeId{0});
    EXPECT_EQ(mac.state().first_join_asn, Asn{1234});
    EXPECT_EQ(ev.link_rssi, -80.0);
}

TEST(TschMac, EbFromStrangerDoesNotJoin)
{
    auto mac = child_mac();
    EXPECT_FALSE(mac.on_frame_received(eb_from(7), -80.0, 5).joined_now);
    EXPECT_FALSE(mac.state().joined);
    EXPECT_FALSE(mac.state().time_source);
}

TEST(TschMac, RepeatedEbRefreshesOnly)
{
    auto mac = child_mac();
    mac.on_frame_received(eb_from(0), -80.0, 100);
    const auto ev = mac.on_frame_received(eb_from(0), -81.0, 500);
    EXPECT_FALSE(ev.joined_now);
    EXPECT_EQ(mac.state().last_heard_asn, Asn{500});
    EXPECT_EQ(mac.state().first_join_asn, Asn{100});
    EXPECT_EQ(mac.state().counters.joins, 1u);
}

TEST(TschMac, JoinedChildSendsEbInItsTurn)
{
    auto mac = child_mac();
    mac.on_frame_received(eb_from(0), -80.0, 0);
    EXPECT_EQ(mac.slot_action(0).kind, ActionKind::Listen);  // root's turn
    EXPECT_EQ(mac.slot_action(3).kind, ActionKind::TransmitEB);
}

TEST(TschMac, EmptyQueueSleepsInOwnUplink)
{
    auto mac = child_mac();
    mac.on_frame_received(eb_from(0), -80.0, 0);
    EXPECT_EQ(mac.slot_action(1).kind, ActionKind::Sleep);
    EXPECT_EQ(mac.slot_action(2).kind, ActionKind::Listen);  // downlink from parent
    ASSERT_TRUE(mac.enqueue_app_frame(21, 1));
    const auto a = mac.slot_action(4);
    EXPECT_EQ(a.kind, ActionKind::TransmitData);
    EXPECT_EQ(a.channel_offset, 1u);
    EXPECT_EQ(a.frame->dst, NodeId{0});
    EXPECT_EQ(a.frame->payload_size, 21u);
}

TEST(TschMac, AckPopsHeadAndLateAckIsIgnored)
{
    auto mac = child_mac();
    mac.on_frame_received(eb_from(0), -80.0, 0);
    mac.enqueue_app_frame(21, 0);
    mac.enqueue_app_frame(21, 0);
    const auto head = mac.state().tx_queue.front().seq;
    for (std::uint32_t i = 0; i <= MacParams{}.max_retries; ++i) mac.on_data_outcome(head, false);
    EXPECT_EQ(mac.state().counters.dropped_retries, 1u);
    EXPECT_EQ(mac.state().tx_queue.size(), 1u);
    const auto ev = mac.on_frame_received(Frame{FrameType::Ack, 0, NodeId{1}, head, 0}, -80.0, 10);
    EXPECT_FALSE(ev.acked_head);
    EXPECT_EQ(mac.state().tx_queue.size(), 1u);
    EXPECT_EQ(mac.state().counters.acked, 0u);
}

TEST(TschMac, RetriesBelowLimitKeepFrame)
{
    auto mac = child_mac();
    mac.enqueue_app_frame(21, 0);
    const auto seq = mac.state().tx_queue.front().seq;
    for (std::uint32_t i = 0; i < MacParams{}.max_retries; ++i) mac.on_data_outcome(seq, false);
    EXPECT_EQ(mac.state().tx_queue.size(), 1u);
    mac.on_data_outcome(seq, false);
    EXPECT_TRUE(mac.state().tx_queue.empty());
}

TEST(TschMac, Keepalive)
{
    MacState never;
    EXPECT_EQ(check_connectivity(never, 5000, 1000), Connectivity::Disconnected);

    auto mac = child_mac();
    mac.on_frame_received(eb_from(0), -80.0, 100);
    EXPECT_EQ(mac.check_connectivity(100 + 500), Connectivity::Connected);   // 5 s
    EXPECT_EQ(mac.check_connectivity(100 + 1000), Connectivity::Connected);  // exactly 10 s
    EXPECT_EQ(mac.check_connectivity(100 + 1001), Connectivity::Disconnected);
    EXPECT_FALSE(mac.state().joined);
    EXPECT_FALSE(mac.state().time_source);
    EXPECT_EQ(mac.state().first_join_asn, Asn{100});
    EXPECT_EQ(mac.state().counters.desyncs, 1u);
}

TEST(TschMac, FirstJoinSetOnce)
{
    auto mac = child_mac();
    mac.on_frame_received(eb_from(0), -80.0, 100);
    mac.check_connectivity(5000);
    mac.on_frame_received(eb_from(0), -80.0, 6000);
    EXPECT_TRUE(mac.state().joined);
    EXPECT_EQ(mac.state().first_join_asn, Asn{100});
    EXPECT_EQ(mac.state().counters.joins, 2u);
}

TEST(TschMac, QueueCapacity)
{
    auto mac = child_mac();
    EXPECT_TRUE(mac.enqueue_app_frame(21, 0));
    for (int i = 1; i < 16; ++i) EXPECT_TRUE(mac.enqueue_app_frame(21, 0));
    EXPECT_EQ(mac.state().tx_queue.size(), 16u);
    EXPECT_FALSE(mac.enqueue_app_frame(21, 0));
    EXPECT_EQ(mac.state().counters.dropped_queue_full, 1u);
    EXPECT_EQ(mac.state().counters.generated, 17u);
    EXPECT_EQ(mac.state().tx_queue.size(), 16u);
}

TEST(TschMac, SecondsToSlots)
{
    EXPECT_EQ(seconds_to_slots(10.0, 0.01), 1000u);
    EXPECT_EQ(seconds_to_slots(1800.0, 0.01), 180000u);
    EXPECT_EQ(seconds_to_slots(0.1, 0.01), 10u);
    EXPECT_EQ(seconds_to_slots(10.01, 0.01), 1001u);
}

TEST(MacParams, Validation)
{
    MacParams p;
    p.queue_capacity = 0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = MacParams{};
    p.keepalive_timeout_s = -1.0;
    EXPECT_THROW(p.validate(), ConfigError);
}
