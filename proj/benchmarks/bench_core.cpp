#include <benchmark/benchmark.h>

#include <cmath>

#include "tschac/active_connectivity.hpp"
#include "tschac/config.hpp"
#include "tschac/mobility.hpp"
#include "tschac/radio_model.hpp"
#include "tschac/simulator.hpp"
#include "tschac/tsch_mac.hpp"

using namespace tschac;

static void BM_HopChannel(benchmark::State& state)
{
    const auto fhs = FhsTable::default_2_4ghz();
    Asn asn = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(hop_channel(fhs, asn++, 1));
    }
}
BENCHMARK(BM_HopChannel);

static void BM_TryReceive(benchmark::State& state)
{
    const RadioParams params;
    auto rng = make_rng(1, "radio/bench");
    for (auto _ : state) {
        benchmark::DoNotOptimize(try_receive(params, 250.0, rng));
    }
}
BENCHMARK(BM_TryReceive);

static void BM_MotionStep(benchmark::State& state)
{
    MotionState s;
    s.target_speed = 3.0;
    const Grid grid;
    for (auto _ : state) {
        s = bounce(step(s, 0.1), grid);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_MotionStep);

static void BM_ControllerSample(benchmark::State& state)
{
    ConnectivityController c(AcMode::ACR, AcParams{}, make_rng(1, "acr/bench"));
    double now = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(c.on_sample(-90.0 + std::sin(now), {now, {}, {1.0, 0.0}, {}}));
        now += 0.01;
    }
}
BENCHMARK(BM_ControllerSample);

// One full default-length run per iteration.
static void BM_Run(benchmark::State& state)
{
    auto config = default_config();
    config.ac_mode = static_cast<AcMode>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run(config, seed++));
    }
    state.SetLabel(std::string(to_string(config.ac_mode)));
}
BENCHMARK(BM_Run)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
