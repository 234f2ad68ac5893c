#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "vistok/chatml.hpp"

namespace {

std::vector<vistok::message> sample_conversation(int turns) {
    std::vector<vistok::message> msgs;
    msgs.push_back({vistok::role::system, {vistok::segment::text("You are a helpful assistant.")}});
    for (int i = 0; i < turns; ++i) {
        msgs.push_back({vistok::role::user,
                        {vistok::segment::image("img" + std::to_string(i) + ".jpg"),
                         vistok::segment::text("Describe picture " + std::to_string(i) + ".")}});
        vistok::agent_step step;
        step.function = "Zoom";
        step.args = {{"point", vistok::arg_value::point(100 + i, 200 + i)}};
        step.result = {vistok::segment::image("crop" + std::to_string(i) + ".jpg")};
        step.return_text = "Zoomed in on the region of interest.";
        msgs.push_back({vistok::role::assistant,
                        {vistok::segment::text("Looking closer.\n"), vistok::segment::step(step)}});
    }
    return msgs;
}

void bm_serialize(benchmark::State& state) {
    const auto msgs = sample_conversation(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(vistok::serialize(msgs));
}
BENCHMARK(bm_serialize)->Arg(4)->Arg(32)->Arg(256);

void bm_parse(benchmark::State& state) {
    const auto text = vistok::serialize(sample_conversation(static_cast<int>(state.range(0)))).text;
    for (auto _ : state) benchmark::DoNotOptimize(vistok::parse(text));
    state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(text.size()));
}
BENCHMARK(bm_parse)->Arg(4)->Arg(32)->Arg(256);

void bm_parse_grounding(benchmark::State& state) {
    std::string text;
    for (int i = 0; i < 64; ++i)
        text += "some prose " +
                vistok::render_grounding("object " + std::to_string(i),
                                         vistok::normalized_box{10, 20, 500, 600}) +
                " more prose\n";
    for (auto _ : state) benchmark::DoNotOptimize(vistok::parse_grounding(text));
    state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(text.size()));
}
BENCHMARK(bm_parse_grounding);

}  // namespace

BENCHMARK_MAIN();
