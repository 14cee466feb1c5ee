#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tschac/harness/config_file.hpp"
#include "tschac/metrics.hpp"

namespace tschac::harness {

struct SweepJob {
    ConfigKey key;
    std::uint64_t seed;
    SimConfig config;
};

/// Expands the matrix: |modes| x |alphas| x |pairs| x |seeds|, except that Off
/// contributes one job per seed. Jobs come out in key order, then seed order.
std::vector<SweepJob> plan_sweep(const SweepSpec& spec);

struct SweepOptions {
    unsigned jobs = 0;  // worker threads; 0 picks hardware_concurrency
    std::function<void(const SweepJob&, const RunRecord&)> on_run_complete;
};

/// Runs every job. Workers share nothing mutable; results are sorted by
/// (key, seed) so the output never depends on completion order. A failing run
/// aborts the sweep with a SimulationError naming its key and seed.
std::vector<RunRecord> run_sweep(const SweepSpec& spec, const SweepOptions& options = {});

}  // namespace tschac::harness
