#include "tschac/harness/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "tschac/error.hpp"
#include "tschac/simulator.hpp"

namespace tschac::harness {

std::vector<SweepJob> plan_sweep(const SweepSpec& spec)
{
    std::vector<SweepJob> jobs;
    for (AcMode mode : spec.modes) {
        if (mode == AcMode::Off) {
            for (auto seed : spec.seeds) {
                SimConfig c = spec.base;
                c.ac_mode = AcMode::Off;
                jobs.push_back({ConfigKey{AcMode::Off, {}, {}, {}}, seed, std::move(c)});
            }
            continue;
        }
        for (double alpha : spec.alphas) {
            for (const auto& pair : spec.threshold_pairs) {
                for (auto seed : spec.seeds) {
                    SimConfig c = spec.base;
                    c.ac_mode = mode;
                    c.ac.alpha = alpha;
                    c.ac.t_min_dbm = pair.t_min_dbm;
                    c.ac.t_max_dbm = pair.t_max_dbm;
                    jobs.push_back({ConfigKey{mode, alpha, pair.t_min_dbm, pair.t_max_dbm}, seed, std::move(c)});
                }
            }
        }
    }
    std::stable_sort(jobs.begin(), jobs.end(), [](const SweepJob& a, const SweepJob& b) {
        if (a.key != b.key) return a.key < b.key;
        return a.seed < b.seed;
    });
    return jobs;
}

std::vector<RunRecord> run_sweep(const SweepSpec& spec, const SweepOptions& options)
{
    spec.validate();
    const auto jobs = plan_sweep(spec);
    std::vector<RunRecord> records(jobs.size());

    unsigned workers = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1)));

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex mutex;
    std::exception_ptr error;

    auto worker = [&] {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const SweepJob& job = jobs[i];
            try {
                const SimResult result = run(job.config, job.seed);
                records[i] = RunRecord{job.key, job.seed, result.headline()};
                if (options.on_run_complete) {
                    std::lock_guard lock(mutex);
                    options.on_run_complete(job, records[i]);
                }
            } catch (const std::exception& e) {
                std::lock_guard lock(mutex);
                if (!error) {
                    error = std::make_exception_ptr(SimulationError(
                        describe(job.key) + " seed " + std::to_string(job.seed) + ": " + e.what()));
                }
                failed = true;
            }
        }
    };

    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
    return records;
}

}  // namespace tschac::harness
