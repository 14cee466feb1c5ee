// tschac: command-line front end for the simulator.
//
//   tschac run             one config, one seed; prints per-node metrics
//   tschac sweep           full mode x alpha x threshold x seed matrix
//   tschac calibrate-radio prints radio defaults chosen by the calibration scan
//
// Exit codes: 0 success, 1 config error, 2 runtime error.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "tschac/error.hpp"
#include "tschac/harness/charts.hpp"
#include "tschac/harness/config_file.hpp"
#include "tschac/harness/csv.hpp"
#include "tschac/harness/sweep.hpp"
#include "tschac/radio_model.hpp"
#include "tschac/simulator.hpp"

namespace fs = std::filesystem;
using namespace tschac;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

/// Mirrors every line to stderr and, once opened, to <out>/run.log.
class Log {
public:
    void open(const fs::path& path)
    {
        file_ = std::make_unique<std::ofstream>(path, std::ios::trunc);
        if (!*file_) throw SimulationError("cannot write " + path.string());
    }

    void info(const std::string& msg) { write("info", msg); }
    void warn(const std::string& msg) { write("warn", msg); }
    void error(const std::string& msg) { write("error", msg); }

private:
    void write(std::string_view level, const std::string& msg)
    {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        localtime_r(&now, &tm);
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%d %H:%M:%S", &tm);
        const std::string line = fmt::format("{} [{}] {}\n", stamp, level, msg);
        std::cerr << line;
        if (file_) {
            *file_ << line;
            file_->flush();
        }
    }

    std::unique_ptr<std::ofstream> file_;
};

struct Common {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
};

harness::SweepSpec load(const Common& opts, Log& log)
{
    if (opts.config.empty()) {
        log.info("no --config given; using built-in defaults");
        return harness::default_sweep();
    }
    log.info("config: " + opts.config);
    return harness::parse_config(opts.config);
}

void prepare_out(const Common& opts, Log& log)
{
    std::error_code ec;
    fs::create_directories(opts.out, ec);
    if (ec) throw SimulationError("cannot create " + opts.out + ": " + ec.message());
    log.open(fs::path(opts.out) / "run.log");
}

std::string metrics_line(const RunMetrics& m)
{
    return fmt::format(
        "node {} ({}): throughput {:.4f} bps, downtime {:.4f} %, distance {:.4f} km/h, "
        "delivered {}/{} frames, disconnections {}, speed commands {}",
        m.node, m.name, throughput_bps(m), downtime_pct(m), distance_km_per_h(m), m.delivered_frames,
        m.generated_frames, m.disconnections, m.speed_commands);
}

int cmd_run(const Common& opts, bool trace, Log& log)
{
    prepare_out(opts, log);
    const auto spec = load(opts, log);
    const std::uint64_t seed = opts.seed.value_or(0);
    log.info(fmt::format("run: mode {} seed {}", to_string(spec.base.ac_mode), seed));

    const auto t0 = std::chrono::steady_clock::now();
    const SimResult result = run(spec.base, seed, RunOptions{trace});
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log.info(fmt::format("simulated {} slots in {:.2f} s", result.slots_executed, elapsed));

    for (const auto& m : result.nodes) {
        const std::string line = metrics_line(m);
        std::cout << line << '\n';
        log.info(line);
    }

    nlohmann::json j = result;
    if (!trace) j.erase("trace");
    const fs::path json_path = fs::path(opts.out) / (trace ? "trace.json" : "result.json");
    std::ofstream json_out(json_path, std::ios::trunc);
    json_out << j.dump(2) << '\n';
    if (!json_out) throw SimulationError("cannot write " + json_path.string());
    log.info("wrote " + json_path.string());
    return 0;
}

int cmd_sweep(const Common& opts, bool charts, unsigned jobs, Log& log)
{
    prepare_out(opts, log);
    auto spec = load(opts, log);
    if (opts.seed) {
        spec.seeds = {*opts.seed};
        log.info(fmt::format("--seed given: sweeping seed {} only", *opts.seed));
    }
    const auto planned = harness::plan_sweep(spec);
    log.info(fmt::format("sweep: {} runs", planned.size()));

    std::size_t done = 0;
    harness::SweepOptions options;
    options.jobs = jobs;
    options.on_run_complete = [&](const harness::SweepJob& job, const RunRecord& rec) {
        ++done;
        log.info(fmt::format("[{}/{}] {} seed {}: throughput {:.4f} bps, downtime {:.4f} %, distance {:.4f} km/h",
                             done, planned.size(), describe(job.key), job.seed, throughput_bps(rec.metrics),
                             downtime_pct(rec.metrics), distance_km_per_h(rec.metrics)));
    };

    const auto t0 = std::chrono::steady_clock::now();
    const auto records = harness::run_sweep(spec, options);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log.info(fmt::format("sweep finished in {:.1f} s", elapsed));

    const auto rows = aggregate(records, spec.seeds);
    const auto paths = harness::emit_csv(records, rows, opts.out);
    log.info("wrote " + paths.raw.string());
    log.info("wrote " + paths.aggregate.string());
    for (const auto& row : rows) {
        std::cout << fmt::format("{:<40} throughput {:8.4f} +- {:7.4f}  downtime {:8.4f} +- {:7.4f}  "
                                 "distance {:7.4f} +- {:6.4f}\n",
                                 describe(row.key), row.throughput_bps.mean, row.throughput_bps.std,
                                 row.downtime_pct.mean, row.downtime_pct.std, row.distance_km_h.mean,
                                 row.distance_km_h.std);
    }
    if (charts) {
        const auto written = harness::emit_charts(rows, fs::path(opts.out) / "charts",
                                                  [&](const std::string& msg) { log.warn(msg); });
        log.info(fmt::format("wrote {} charts", written.size()));
    }
    return 0;
}

int cmd_calibrate(const Common& opts, Log& log)
{
    RadioParams base;
    if (!opts.config.empty()) base = harness::parse_config(opts.config).base.radio;
    const CalibrationTargets targets;
    const auto result = calibrate_radio(base, targets);
    const auto& r = result.params;
    log.info(fmt::format("calibrated: eta {} rssi_50 {} dBm", r.eta, r.rssi50_dbm));
    std::cout << fmt::format("# p({} m) = {:.4f}, p({} m, no shadowing) = {:.4f}, p({} dBm) = {:.4f}\n",
                             targets.near_distance_m, result.near_probability, targets.far_distance_m,
                             result.far_probability, targets.activation_rssi_dbm, result.activation_probability);
    std::cout << "[radio]\n";
    std::cout << fmt::format("tx_power = {}\npl0 = {}\nd0 = {}\neta = {}\nshadow_sigma = {}\n", r.tx_power_dbm,
                             r.pl0_db, r.d0_m, r.eta, r.shadow_sigma_db);
    std::cout << fmt::format("rssi_50 = {}\nlogistic_width = {}\nmax_range = {}\nrssi_floor = {}\n", r.rssi50_dbm,
                             r.logistic_width_db, r.max_range_m, r.rssi_floor_dbm);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"TSCH mobility simulator with RSSI-driven speed regulation"};
    app.require_subcommand(1);

    Common opts;
    bool trace = false;
    bool charts = true;
    unsigned jobs = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config, "TOML config file (built-in defaults if omitted)");
        sub->add_option("--out", opts.out, "output directory")->capture_default_str();
    };

    auto* run_cmd = app.add_subcommand("run", "simulate one config with one seed and print metrics");
    add_common(run_cmd);
    run_cmd->add_option("--seed", opts.seed, "RNG seed (default 0)");
    run_cmd->add_flag("--trace", trace, "write the event trace to <out>/trace.json");

    auto* sweep_cmd = app.add_subcommand("sweep", "run the full matrix and write CSV and charts");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--seed", opts.seed, "sweep this single seed instead of the configured list");
    sweep_cmd->add_flag("--charts,!--no-charts", charts, "write charts/*.svg (default on)");
    sweep_cmd->add_option("--jobs,-j", jobs, "worker threads (default: hardware concurrency)");

    auto* cal_cmd = app.add_subcommand("calibrate-radio", "run the radio calibration scan and print defaults");
    cal_cmd->add_option("--config", opts.config, "take non-calibrated radio keys from this config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    Log log;
    try {
        if (*run_cmd) return cmd_run(opts, trace, log);
        if (*sweep_cmd) return cmd_sweep(opts, charts, jobs, log);
        return cmd_calibrate(opts, log);
    } catch (const ConfigError& e) {
        log.error(std::string("config error: ") + e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        log.error(std::string("runtime error: ") + e.what());
        return kExitRuntime;
    }
}
