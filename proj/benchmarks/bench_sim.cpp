#include <benchmark/benchmark.h>

#include "agekit/simkit.hpp"

using namespace agekit;

namespace {

simkit::SimConfig make_config(schedopt::PolicyKind kind, double rho) {
    simkit::SimConfig cfg;
    cfg.params = sbpsq::SystemParams::from_shorthand(rho, 1.0, 1.0, 1.0);
    cfg.policy.kind = kind;
    cfg.policy.p1 = 0.5;
    cfg.horizon_events = 200'000;
    cfg.seed = 1;
    return cfg;
}

void BM_SimulateProbabilistic(benchmark::State& state) {
    const auto cfg = make_config(schedopt::PolicyKind::H1, static_cast<double>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(simkit::simulate(cfg));
    }
    state.SetItemsProcessed(state.iterations() * cfg.horizon_events);
}
BENCHMARK(BM_SimulateProbabilistic)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_SimulateBucket(benchmark::State& state) {
    const auto cfg = make_config(schedopt::PolicyKind::H2, static_cast<double>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(simkit::simulate(cfg));
    }
    state.SetItemsProcessed(state.iterations() * cfg.horizon_events);
}
BENCHMARK(BM_SimulateBucket)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_SimulateBufferless(benchmark::State& state) {
    const auto cfg = make_config(schedopt::PolicyKind::Npb, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(simkit::simulate(cfg));
    }
    state.SetItemsProcessed(state.iterations() * cfg.horizon_events);
}
BENCHMARK(BM_SimulateBufferless)->Unit(benchmark::kMillisecond);

}  // namespace
