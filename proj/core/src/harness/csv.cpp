#include "tschac/harness/csv.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "tschac/error.hpp"

namespace tschac::harness {

namespace {

std::string opt(const std::optional<double>& v)
{
    return v ? fmt::format("{:.4f}", *v) : std::string{};
}

std::string key_columns(const ConfigKey& key)
{
    return fmt::format("{},{},{},{}", to_string(key.mode), opt(key.alpha), opt(key.t_min_dbm), opt(key.t_max_dbm));
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double number(const std::string& s, std::size_t line)
{
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw SimulationError(fmt::format("csv line {}: bad number '{}'", line, s));
}

std::optional<double> opt_number(const std::string& s, std::size_t line)
{
    if (s.empty()) return std::nullopt;
    return number(s, line);
}

ConfigKey parse_key(const std::vector<std::string>& cells, std::size_t line)
{
    ConfigKey key;
    key.mode = parse_ac_mode(cells[0]);
    key.alpha = opt_number(cells[1], line);
    key.t_min_dbm = opt_number(cells[2], line);
    key.t_max_dbm = opt_number(cells[3], line);
    return key;
}

template <typename Row, typename Fn>
std::vector<Row> read_rows(std::istream& in, std::string_view header, std::size_t columns, Fn parse)
{
    std::string line;
    if (!std::getline(in, line) || line != header) throw SimulationError("csv: unexpected header");
    std::vector<Row> rows;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != columns) {
            throw SimulationError(fmt::format("csv line {}: expected {} fields, got {}", n, columns, cells.size()));
        }
        rows.push_back(parse(cells, n));
    }
    return rows;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) throw SimulationError("cannot write " + path.string());
}

}  // namespace

void write_raw_csv(std::ostream& out, std::span<const RunRecord> records)
{
    out << kRawHeader << '\n';
    for (const auto& r : records) {
        out << fmt::format("{},{},{:.4f},{:.4f},{:.4f}\n", key_columns(r.key), r.seed, throughput_bps(r.metrics),
                           downtime_pct(r.metrics), distance_km_per_h(r.metrics));
    }
}

void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows)
{
    out << kAggregateHeader << '\n';
    for (const auto& r : rows) {
        out << fmt::format("{},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{}\n", key_columns(r.key),
                           r.throughput_bps.mean, r.throughput_bps.std, r.downtime_pct.mean, r.downtime_pct.std,
                           r.distance_km_h.mean, r.distance_km_h.std, r.seed_count);
    }
}

std::vector<RawRow> read_raw_csv(std::istream& in)
{
    return read_rows<RawRow>(in, kRawHeader, 8, [](const std::vector<std::string>& c, std::size_t line) {
        RawRow row;
        row.key = parse_key(c, line);
        row.seed = std::stoull(c[4]);
        row.throughput_bps = number(c[5], line);
        row.downtime_pct = number(c[6], line);
        row.distance_km_h = number(c[7], line);
        return row;
    });
}

std::vector<AggregateRow> read_aggregate_csv(std::istream& in)
{
    return read_rows<AggregateRow>(in, kAggregateHeader, 11, [](const std::vector<std::string>& c, std::size_t line) {
        AggregateRow row;
        row.key = parse_key(c, line);
        row.throughput_bps = {number(c[4], line), number(c[5], line)};
        row.downtime_pct = {number(c[6], line), number(c[7], line)};
        row.distance_km_h = {number(c[8], line), number(c[9], line)};
        row.seed_count = std::stoull(c[10]);
        return row;
    });
}

CsvPaths emit_csv(std::span<const RunRecord> records, std::span<const AggregateRow> rows,
                  const std::filesystem::path& out_dir)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw SimulationError("cannot create " + out_dir.string() + ": " + ec.message());
    CsvPaths paths{out_dir / "raw.csv", out_dir / "aggregate.csv"};
    std::ostringstream raw;
    write_raw_csv(raw, records);
    write_file(paths.raw, raw.str());
    std::ostringstream agg;
    write_aggregate_csv(agg, rows);
    write_file(paths.aggregate, agg.str());
    return paths;
}

}  // namespace tschac::harness
