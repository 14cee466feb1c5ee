#include "tschac/harness/charts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>

#include "tschac/error.hpp"

namespace tschac::harness {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

const MetricSummary& pick(const AggregateRow& row, ChartMetric metric)
{
    switch (metric) {
    case ChartMetric::Throughput: return row.throughput_bps;
    case ChartMetric::Downtime: return row.downtime_pct;
    case ChartMetric::Distance: return row.distance_km_h;
    }
    return row.throughput_bps;
}

std::string_view axis_label(ChartMetric metric)
{
    switch (metric) {
    case ChartMetric::Throughput: return "throughput (bps)";
    case ChartMetric::Downtime: return "downtime (%)";
    case ChartMetric::Distance: return "distance (km/h)";
    }
    return "";
}

/// Rounds the axis top up to 1, 2 or 5 times a power of ten.
double nice_ceiling(double v)
{
    if (v <= 0.0) return 1.0;
    const double p = std::pow(10.0, std::floor(std::log10(v)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * p >= v) return m * p;
    }
    return 10.0 * p;
}

}  // namespace

std::string_view to_string(ChartMetric metric)
{
    switch (metric) {
    case ChartMetric::Throughput: return "throughput";
    case ChartMetric::Downtime: return "downtime";
    case ChartMetric::Distance: return "distance";
    }
    return "unknown";
}

std::string render_chart_svg(std::span<const AggregateRow> rows, ChartMetric metric, AcMode mode)
{
    std::set<std::pair<double, double>> pairs;
    std::map<double, std::map<std::pair<double, double>, MetricSummary>> series;
    std::optional<MetricSummary> off;
    for (const auto& row : rows) {
        if (row.key.mode == AcMode::Off) {
            off = pick(row, metric);
            continue;
        }
        if (row.key.mode != mode || !row.key.alpha || !row.key.t_min_dbm || !row.key.t_max_dbm) continue;
        const std::pair<double, double> pair{*row.key.t_min_dbm, *row.key.t_max_dbm};
        pairs.insert(pair);
        series[*row.key.alpha][pair] = pick(row, metric);
    }

    double top = off ? off->mean : 0.0;
    for (const auto& [alpha, points] : series) {
        for (const auto& [pair, s] : points) top = std::max(top, s.mean + s.std);
    }
    top = nice_ceiling(top * 1.05);

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const std::vector<std::pair<double, double>> cats(pairs.begin(), pairs.end());
    const double band = cats.empty() ? plot_w : plot_w / static_cast<double>(cats.size());
    auto y_of = [&](double v) { return kTop + plot_h * (1.0 - std::clamp(v / top, 0.0, 1.0)); };

    std::string svg;
    auto out = std::back_inserter(svg);
    fmt::format_to(out,
                   "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
                   "font-family=\"sans-serif\" font-size=\"12\">\n",
                   kWidth, kHeight);
    fmt::format_to(out, "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
    fmt::format_to(out, "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{} ({})</text>\n",
                   kLeft + plot_w / 2, axis_label(metric), to_string(mode));

    // Axes and y ticks.
    fmt::format_to(out, "<g class=\"axes\" stroke=\"black\">\n");
    fmt::format_to(out, "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\"/>\n", kLeft, kTop, kTop + plot_h);
    fmt::format_to(out, "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\"/>\n", kLeft, kTop + plot_h, kLeft + plot_w);
    fmt::format_to(out, "</g>\n");
    for (int i = 0; i <= 5; ++i) {
        const double v = top * i / 5.0;
        const double y = y_of(v);
        fmt::format_to(out, "<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n", kLeft, y,
                       kLeft + plot_w, y);
        fmt::format_to(out, "<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n", kLeft - 6, y + 4, v);
    }
    fmt::format_to(out,
                   "<text x=\"16\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0:.2f})\">{1}</text>\n",
                   kTop + plot_h / 2, axis_label(metric));

    for (std::size_t c = 0; c < cats.size(); ++c) {
        const double x = kLeft + band * (c + 0.5);
        fmt::format_to(out, "<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">[{:g}, {:g}] dBm</text>\n", x,
                       kTop + plot_h + 20, cats[c].first, cats[c].second);
    }
    fmt::format_to(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">thresholds [t_min, t_max]</text>\n",
                   kLeft + plot_w / 2, kHeight - 12);

    if (off) {
        const double y = y_of(off->mean);
        fmt::format_to(out,
                       "<line class=\"off-reference\" data-mean=\"{:.4f}\" x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" "
                       "y2=\"{:.2f}\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n",
                       off->mean, kLeft, y, kLeft + plot_w, y);
    }

    const std::size_t n_series = series.size();
    std::size_t s_index = 0;
    for (const auto& [alpha, points] : series) {
        const char* color = kPalette[s_index % std::size(kPalette)];
        const double offset = n_series > 1
                                  ? (static_cast<double>(s_index) - (n_series - 1) / 2.0) * std::min(24.0, band / (n_series + 1))
                                  : 0.0;
        fmt::format_to(out, "<g class=\"series\" data-alpha=\"{:.4f}\" fill=\"{}\" stroke=\"{}\">\n", alpha, color,
                       color);
        std::string path;
        for (std::size_t c = 0; c < cats.size(); ++c) {
            auto it = points.find(cats[c]);
            if (it == points.end()) continue;
            const auto& s = it->second;
            const double x = kLeft + band * (c + 0.5) + offset;
            const double y = y_of(s.mean);
            path += fmt::format("{}{:.2f},{:.2f}", path.empty() ? "M" : " L", x, y);
            fmt::format_to(out, "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n", x,
                           y_of(s.mean - s.std), y_of(s.mean + s.std));
            fmt::format_to(out,
                           "<circle class=\"point\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" data-t-min=\"{:.4f}\" "
                           "data-t-max=\"{:.4f}\" data-mean=\"{:.4f}\" data-std=\"{:.4f}\"/>\n",
                           x, y, cats[c].first, cats[c].second, s.mean, s.std);
        }
        if (!path.empty()) fmt::format_to(out, "<path d=\"{}\" fill=\"none\"/>\n", path);
        fmt::format_to(out, "</g>\n");
        const double ly = kTop + 10 + 18.0 * s_index;
        fmt::format_to(out, "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n", kLeft + plot_w + 16,
                       ly - 9, color);
        fmt::format_to(out, "<text x=\"{}\" y=\"{}\">alpha = {:g}</text>\n", kLeft + plot_w + 32, ly, alpha);
        ++s_index;
    }
    if (off) {
        const double ly = kTop + 10 + 18.0 * s_index;
        fmt::format_to(out, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n",
                       kLeft + plot_w + 12, ly - 4, kLeft + plot_w + 28, ly - 4);
        fmt::format_to(out, "<text x=\"{}\" y=\"{}\">Off</text>\n", kLeft + plot_w + 32, ly);
    }
    svg += "</svg>\n";
    return svg;
}

std::vector<std::filesystem::path> emit_charts(std::span<const AggregateRow> rows,
                                               const std::filesystem::path& out_dir,
                                               const std::function<void(const std::string&)>& warn)
{
    std::vector<std::filesystem::path> written;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw SimulationError("cannot create " + out_dir.string() + ": " + ec.message());
    for (AcMode mode : {AcMode::AC, AcMode::ACR}) {
        const bool present =
            std::any_of(rows.begin(), rows.end(), [&](const AggregateRow& r) { return r.key.mode == mode; });
        if (!present) {
            if (warn) warn(fmt::format("no {} rows; skipping its charts", to_string(mode)));
            continue;
        }
        for (ChartMetric metric : {ChartMetric::Throughput, ChartMetric::Downtime, ChartMetric::Distance}) {
            const auto path = out_dir / fmt::format("{}_{}.svg", to_string(metric), to_string(mode));
            std::ofstream file(path, std::ios::binary | std::ios::trunc);
            file << render_chart_svg(rows, metric, mode);
            file.flush();
            if (!file) throw SimulationError("cannot write " + path.string());
            written.push_back(path);
        }
    }
    return written;
}

}  // namespace tschac::harness
