// Serial references against the OpenMP kernels, plus the exact oracles.

#include <benchmark/benchmark.h>

#include "contagion/coupling.hpp"
#include "contagion/gadgets.hpp"
#include "contagion/layered.hpp"
#include "../tests/fixtures.hpp"

using namespace contagion;

namespace {

const GameSpec& mc_game() {
    static const GameSpec g = [] {
        auto s = convexity_amplifier(4, 3, 2.0, 2000, 0, 1);
        return *s.explicit_game();
    }();
    return g;
}

StrategyProfile mc_profile() {
    auto s = convexity_amplifier(4, 3, 2.0, 2000, 0, 1);
    return StrategyProfile::pure(s.red, s.blue);
}

void BM_EstimateSerial(benchmark::State& st) {
    auto p = mc_profile();
    for (auto _ : st) benchmark::DoNotOptimize(estimate_payoffs_serial(mc_game(), p, st.range(0), 1));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_EstimateSerial)->Arg(2000)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_EstimateParallel(benchmark::State& st) {
    auto p = mc_profile();
    for (auto _ : st) benchmark::DoNotOptimize(estimate_payoffs(mc_game(), p, 2000, 1, static_cast<int>(st.range(0))));
    st.SetItemsProcessed(st.iterations() * 2000);
    st.counters["threads"] = static_cast<double>(st.range(0));
}
BENCHMARK(BM_EstimateParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_CoupleTest(benchmark::State& st) {
    CoupleTestConfig cfg;
    cfg.mode = CoupleMode::Lemma1;
    cfg.runs = 2000;
    cfg.instances = 10;
    cfg.exact_instances = 2;
    cfg.threads = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(couple_test(cfg));
    st.counters["threads"] = static_cast<double>(st.range(0));
}
// one thread is the serial reference
BENCHMARK(BM_CoupleTest)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_LayeredDP(benchmark::State& st) {
    auto s = convexity_amplifier(4, 4, 2.0, 20000, 0, 1);
    for (auto _ : st) benchmark::DoNotOptimize(layered_pure_payoffs(*s.layered, s.red, s.blue));
}
BENCHMARK(BM_LayeredDP)->Unit(benchmark::kMillisecond);

void BM_ExactChain(benchmark::State& st) {
    auto s = chain_replication(static_cast<int>(st.range(0)), (1 << st.range(0)) + 1, 1000);
    for (auto _ : st) benchmark::DoNotOptimize(exact_pure_payoffs(*s.game, s.red, s.blue));
}
BENCHMARK(BM_ExactChain)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_ExactRandomSmall(benchmark::State& st) {
    Rng rng(9);
    auto g = fx::random_graph(8, 0.35, rng);
    GameSpec gs{g, fx::power_tullock(0.5, 1.0), ParallelRounds{8, false}, 2, 2};
    Allocation r(8, {0, 1}), b(8, {2, 3});
    for (auto _ : st) benchmark::DoNotOptimize(exact_pure_payoffs(gs, r, b));
}
BENCHMARK(BM_ExactRandomSmall)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
