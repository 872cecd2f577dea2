#include <benchmark/benchmark.h>

#include "agekit/closedform.hpp"
#include "agekit/ctmc.hpp"
#include "agekit/sbpsq.hpp"
#include "agekit/schedopt.hpp"

using namespace agekit;

namespace {

const sbpsq::SystemParams kParams = sbpsq::SystemParams::from_shorthand(2.0, 0.5, 4.0, 4.0);
const sbpsq::SchedProb kProb{0.6};

void BM_StationarySolve(benchmark::State& state) {
    const auto gen = sbpsq::build_foreground(kParams, kProb);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ctmc::stationary(gen));
    }
}
BENCHMARK(BM_StationarySolve);

void BM_SourceChainBuild(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(sbpsq::source_chain(kParams, kProb, 1));
    }
}
BENCHMARK(BM_SourceChainBuild);

void BM_WeightedMetrics(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(sbpsq::weighted_metrics(kParams, kProb));
    }
}
BENCHMARK(BM_WeightedMetrics);

void BM_DensityGrid(benchmark::State& state) {
    const auto chain = sbpsq::source_chain(kParams, kProb, 1);
    const auto& s = chain.absorb_vector("s");
    std::vector<double> xs(state.range(0));
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 20.0 * (i + 1.0) / xs.size();
    for (auto _ : state) {
        benchmark::DoNotOptimize(ctmc::pdf_grid(chain, s, xs));
    }
    state.SetItemsProcessed(state.iterations() * xs.size());
}
BENCHMARK(BM_DensityGrid)->Arg(100)->Arg(400);

void BM_ExpAction(benchmark::State& state) {
    const auto chain = sbpsq::source_chain(kParams, kProb, 1);
    const auto& s = chain.absorb_vector("s");
    const double t = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(ctmc::exp_action(chain, s, t));
    }
}
BENCHMARK(BM_ExpAction)->Arg(1)->Arg(10)->Arg(100);

void BM_OpsOptimize(benchmark::State& state) {
    const auto metric = state.range(0) == 0 ? schedopt::Metric::PAoI : schedopt::Metric::AoI;
    for (auto _ : state) {
        benchmark::DoNotOptimize(schedopt::ops_optimize(kParams, metric));
    }
}
BENCHMARK(BM_OpsOptimize)->Arg(0)->Arg(1);

void BM_HeavyTrafficQuarticMin(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(closedform::ht_opt_ratio_aoi(4.0, 4.0, 1.0));
    }
}
BENCHMARK(BM_HeavyTrafficQuarticMin);

}  // namespace
