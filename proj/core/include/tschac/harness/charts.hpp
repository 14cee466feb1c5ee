#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tschac/metrics.hpp"

namespace tschac::harness {

enum class ChartMetric { Throughput, Downtime, Distance };

std::string_view to_string(ChartMetric metric);

/// One SVG: x axis = threshold pairs, one series per alpha with std error
/// bars, dashed reference line at the Off mean when an Off row exists. Each
/// data point carries data-mean / data-std attributes with the plotted values.
std::string render_chart_svg(std::span<const AggregateRow> rows, ChartMetric metric, AcMode mode);

/// Writes <metric>_<mode>.svg for every metric and every regulating mode that
/// has rows. Modes without rows are skipped and reported through `warn`.
std::vector<std::filesystem::path> emit_charts(std::span<const AggregateRow> rows,
                                               const std::filesystem::path& out_dir,
                                               const std::function<void(const std::string&)>& warn = {});

}  // namespace tschac::harness
