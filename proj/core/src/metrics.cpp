#include "tschac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "tschac/error.hpp"

namespace tschac {

double throughput_bps(const RunMetrics& m)
{
    if (!(m.duration_s > 0.0)) return 0.0;
    return 8.0 * static_cast<double>(m.delivered_payload_bytes) / m.duration_s;
}

double downtime_pct(const RunMetrics& m)
{
    if (!m.first_join_time_s || !(m.total_time_after_first_join_s > 0.0)) return 100.0;
    return 100.0 * m.disconnected_time_after_first_join_s / m.total_time_after_first_join_s;
}

double distance_km_per_h(const RunMetrics& m)
{
    if (!(m.duration_s > 0.0)) return 0.0;
    return (m.odometer_m / 1000.0) / (m.duration_s / 3600.0);
}

std::string describe(const ConfigKey& key)
{
    std::ostringstream out;
    out << to_string(key.mode);
    if (key.alpha) out << " alpha=" << *key.alpha;
    if (key.t_min_dbm && key.t_max_dbm) out << " thresholds=(" << *key.t_min_dbm << "," << *key.t_max_dbm << ")";
    return out.str();
}

MetricSummary summarize(std::span<const double> values)
{
    MetricSummary s;
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values) sq += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
    }
    return s;
}

std::vector<AggregateRow> aggregate(std::span<const RunRecord> records, std::span<const std::uint64_t> expected_seeds)
{
    std::map<ConfigKey, std::vector<const RunRecord*>> groups;
    for (const auto& r : records) groups[r.key].push_back(&r);

    std::vector<AggregateRow> rows;
    rows.reserve(groups.size());
    for (auto& [key, group] : groups) {
        // Fold in seed order so floating-point sums do not depend on input order.
        std::sort(group.begin(), group.end(), [](const RunRecord* a, const RunRecord* b) { return a->seed < b->seed; });

        std::set<std::uint64_t> seen;
        for (const auto* r : group) seen.insert(r->seed);
        std::vector<std::uint64_t> missing;
        for (auto s : expected_seeds) {
            if (!seen.contains(s)) missing.push_back(s);
        }
        if (!missing.empty()) {
            std::ostringstream msg;
            msg << describe(key) << ": missing seeds";
            for (auto s : missing) msg << ' ' << s;
            throw SimulationError(msg.str());
        }
        if (!expected_seeds.empty() && group.size() != expected_seeds.size()) {
            throw SimulationError(describe(key) + ": unexpected or duplicate seeds");
        }

        std::vector<double> tput, down, dist;
        for (const auto* r : group) {
            tput.push_back(throughput_bps(r->metrics));
            down.push_back(downtime_pct(r->metrics));
            dist.push_back(distance_km_per_h(r->metrics));
        }
        rows.push_back(AggregateRow{key, summarize(tput), summarize(down), summarize(dist), group.size()});
    }
    return rows;
}

}  // namespace tschac
