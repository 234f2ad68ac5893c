#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vistok/packing.hpp"

namespace {

std::vector<vistok::pack_item> make_items(size_t count, int64_t budget) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int64_t> len(1, budget);
    std::vector<vistok::pack_item> items;
    items.reserve(count);
    for (size_t i = 0; i < count; ++i) items.push_back({std::to_string(i), len(rng)});
    return items;
}

void bm_pack(benchmark::State& state) {
    const auto items = make_items(static_cast<size_t>(state.range(0)), 16384);
    for (auto _ : state) benchmark::DoNotOptimize(vistok::pack(items, 16384));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_pack)->Arg(100)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
