#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tschac/active_connectivity.hpp"
#include "tschac/types.hpp"

namespace tschac {

/// Per-node measurements over one run.
///
/// Frame accounting identities (checked by tests):
///   generated = acked + dropped_retries + dropped_queue_full + in_queue_at_end
///   delivered = acked + dropped_retries_delivered + in_queue_delivered
/// where `delivered` counts unique frames that reached the root's application.
struct RunMetrics {
    NodeId node = 0;
    std::string name;
    std::uint32_t payload_size = 0;
    double duration_s = 0.0;

    std::uint64_t generated_frames = 0;
    std::uint64_t delivered_frames = 0;
    std::uint64_t delivered_payload_bytes = 0;
    std::uint64_t acked_frames = 0;
    std::uint64_t dropped_queue_full = 0;
    std::uint64_t dropped_retries = 0;
    std::uint64_t dropped_retries_delivered = 0;
    std::uint64_t in_queue_at_end = 0;
    std::uint64_t in_queue_delivered = 0;

    std::optional<double> first_join_time_s;
    double disconnected_time_after_first_join_s = 0.0;
    double total_time_after_first_join_s = 0.0;
    std::uint64_t disconnections = 0;

    double odometer_m = 0.0;
    std::uint64_t speed_commands = 0;

    std::uint64_t dropped_frames() const { return dropped_queue_full + dropped_retries; }
};

/// Application payload bits delivered to the root per second of run time.
double throughput_bps(const RunMetrics& metrics);

/// Share of post-join time spent disconnected, in percent. A node that never
/// joins reports 100.
double downtime_pct(const RunMetrics& metrics);

/// Odometer normalised to km per hour of run time.
double distance_km_per_h(const RunMetrics& metrics);

/// Identifies one cell of the experiment matrix. Off runs carry no AC
/// parameters, so they form a single key regardless of the alpha/threshold grid.
struct ConfigKey {
    AcMode mode = AcMode::Off;
    std::optional<double> alpha;
    std::optional<double> t_min_dbm;
    std::optional<double> t_max_dbm;

    friend auto operator<=>(const ConfigKey&, const ConfigKey&) = default;
    friend bool operator==(const ConfigKey&, const ConfigKey&) = default;
};

std::string describe(const ConfigKey& key);

struct RunRecord {
    ConfigKey key;
    std::uint64_t seed = 0;
    RunMetrics metrics;  // headline (child) node
};

struct MetricSummary {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, n - 1 denominator
};

struct AggregateRow {
    ConfigKey key;
    MetricSummary throughput_bps;
    MetricSummary downtime_pct;
    MetricSummary distance_km_h;
    std::size_t seed_count = 0;
};

MetricSummary summarize(std::span<const double> values);

/// Groups records by key, checks that each key saw exactly `expected_seeds`
/// (throws SimulationError listing the absent seeds otherwise) and returns
/// rows sorted by (mode, alpha, t_min, t_max).
std::vector<AggregateRow> aggregate(std::span<const RunRecord> records,
                                    std::span<const std::uint64_t> expected_seeds);

}  // namespace tschac
