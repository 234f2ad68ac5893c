#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>

#include "vistok/resize.hpp"

namespace {

void bm_smart_resize(benchmark::State& state) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int64_t> side(1, 20000);
    for (auto _ : state) {
        const int64_t h = side(rng);
        const int64_t w = std::clamp<int64_t>(side(rng), (h + 199) / 200, h * 200);
        benchmark::DoNotOptimize(vistok::smart_resize(h, w));
    }
}
BENCHMARK(bm_smart_resize);

void bm_plan_video(benchmark::State& state) {
    const int64_t frames = state.range(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(vistok::plan_video(frames, 30.0, 1080, 1920));
    state.SetItemsProcessed(state.iterations() * frames);
}
BENCHMARK(bm_plan_video)->Arg(300)->Arg(3600)->Arg(36000);

void bm_fixed_token_resize(benchmark::State& state) {
    const int64_t n = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(vistok::fixed_token_resize(1080, 1920, n));
}
BENCHMARK(bm_fixed_token_resize)->Arg(64)->Arg(1024)->Arg(16384);

}  // namespace

BENCHMARK_MAIN();
