#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "vistok/attention.hpp"
#include "vistok/mrope.hpp"

namespace {

vistok::patch_grid grid(int64_t t, int64_t h, int64_t w) {
    vistok::patch_grid g;
    g.grid_t = t;
    g.grid_h = h;
    g.grid_w = w;
    return g;
}

void bm_assign_positions(benchmark::State& state) {
    const int64_t side = state.range(0);
    const std::vector<vistok::segment_descriptor> segs = {
        vistok::segment_descriptor::text(128),
        vistok::segment_descriptor::image(grid(1, side, side)),
        vistok::segment_descriptor::text(128)};
    for (auto _ : state) benchmark::DoNotOptimize(vistok::assign_positions(segs));
    state.SetItemsProcessed(state.iterations() * (256 + side * side));
}
BENCHMARK(bm_assign_positions)->Arg(8)->Arg(32)->Arg(128);

void bm_apply_rotary(benchmark::State& state) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> dist;
    std::vector<double> v(64);
    for (auto& x : v) x = dist(rng);
    const auto cfg = vistok::rotary_config::with_default_sections(64);
    const vistok::position_triple p{17, 23, 31};
    for (auto _ : state) benchmark::DoNotOptimize(vistok::apply_rotary(v, p, cfg));
}
BENCHMARK(bm_apply_rotary);

void bm_score_matrix(benchmark::State& state) {
    const int64_t tokens = state.range(0);
    std::mt19937_64 rng(13);
    std::normal_distribution<double> dist;
    vistok::attention_case c;
    c.plan = vistok::assign_positions({vistok::segment_descriptor::text(tokens)});
    c.cfg = vistok::rotary_config::with_default_sections(64);
    c.queries.assign(static_cast<size_t>(tokens), std::vector<double>(64));
    c.keys = c.queries;
    for (auto& row : c.queries)
        for (auto& x : row) x = dist(rng);
    for (auto& row : c.keys)
        for (auto& x : row) x = dist(rng);
    for (auto _ : state) benchmark::DoNotOptimize(vistok::score_matrix(c));
    state.SetItemsProcessed(state.iterations() * tokens * tokens);
}
BENCHMARK(bm_score_matrix)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
