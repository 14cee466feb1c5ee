#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "tschac/metrics.hpp"

namespace tschac::harness {

inline constexpr std::string_view kRawHeader =
    "mode,alpha,t_min_dbm,t_max_dbm,seed,throughput_bps,downtime_pct,distance_km_h";
inline constexpr std::string_view kAggregateHeader =
    "mode,alpha,t_min_dbm,t_max_dbm,throughput_bps_mean,throughput_bps_std,"
    "downtime_pct_mean,downtime_pct_std,distance_km_h_mean,distance_km_h_std,n_seeds";

void write_raw_csv(std::ostream& out, std::span<const RunRecord> records);
void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows);

struct RawRow {
    ConfigKey key;
    std::uint64_t seed = 0;
    double throughput_bps = 0.0;
    double downtime_pct = 0.0;
    double distance_km_h = 0.0;
};

std::vector<RawRow> read_raw_csv(std::istream& in);
std::vector<AggregateRow> read_aggregate_csv(std::istream& in);

struct CsvPaths {
    std::filesystem::path raw;
    std::filesystem::path aggregate;
};

/// Writes raw.csv and aggregate.csv into `out_dir` (created if needed).
/// Throws SimulationError if the directory or files cannot be written.
CsvPaths emit_csv(std::span<const RunRecord> records, std::span<const AggregateRow> rows,
                  const std::filesystem::path& out_dir);

}  // namespace tschac::harness
