#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "vistok/mrope.hpp"

using vistok::mrope_error;
using vistok::position_triple;
using vistok::rotary_config;
using vistok::segment_descriptor;

namespace {

position_triple tr(int64_t t, int64_t h, int64_t w) { return {t, h, w}; }

}  // namespace

TEST_SUITE_BEGIN("mrope");

TEST_CASE("text tokens carry identical components that count up") {
    const auto plan = vistok::assign_positions({segment_descriptor::text(3)});
    REQUIRE(plan.triples.size() == 3);
    CHECK(plan.triples[0] == tr(0, 0, 0));
    CHECK(plan.triples[1] == tr(1, 1, 1));
    CHECK(plan.triples[2] == tr(2, 2, 2));
    CHECK(plan.segment_spans == std::vector<std::pair<size_t, size_t>>{{0, 3}});
}

TEST_CASE("image tokens vary only in the spatial components") {
    const auto plan =
        vistok::assign_positions({segment_descriptor::image(gen::make_grid(1, 2, 2))});
    REQUIRE(plan.triples.size() == 4);
    CHECK(plan.triples[0] == tr(0, 0, 0));
    CHECK(plan.triples[1] == tr(0, 0, 1));
    CHECK(plan.triples[2] == tr(0, 1, 0));
    CHECK(plan.triples[3] == tr(0, 1, 1));
}

TEST_CASE("each segment starts one past the previous maximum component") {
    const auto plan = vistok::assign_positions(
        {segment_descriptor::text(2), segment_descriptor::image(gen::make_grid(1, 2, 2)),
         segment_descriptor::text(1)});
    REQUIRE(plan.triples.size() == 7);
    CHECK(plan.triples[0] == tr(0, 0, 0));
    CHECK(plan.triples[1] == tr(1, 1, 1));
    CHECK(plan.triples[2] == tr(2, 2, 2));
    CHECK(plan.triples[3] == tr(2, 2, 3));
    CHECK(plan.triples[4] == tr(2, 3, 2));
    CHECK(plan.triples[5] == tr(2, 3, 3));
    // After the image the maximum component is 3, so text resumes at 4.
    CHECK(plan.triples[6] == tr(4, 4, 4));
    CHECK(plan.segment_spans ==
          std::vector<std::pair<size_t, size_t>>{{0, 2}, {2, 6}, {6, 7}});
}

TEST_CASE("video temporal ids advance per tube while spatial ids repeat") {
    const auto plan =
        vistok::assign_positions({segment_descriptor::video(gen::make_grid(2, 2, 2))});
    REQUIRE(plan.triples.size() == 8);
    for (int tube = 0; tube < 2; ++tube)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                CHECK(plan.triples[static_cast<size_t>(tube * 4 + r * 2 + c)] == tr(tube, r, c));
}

TEST_CASE("max_position reports the largest component") {
    CHECK(vistok::max_position(vistok::assign_positions({segment_descriptor::text(10)})) == 9);
    const auto img = vistok::assign_positions({segment_descriptor::image(gen::make_grid(1, 4, 4))});
    CHECK(vistok::max_position(img) == 3);  // sixteen tokens would reach 15 in 1D
    const auto mixed = vistok::assign_positions(
        {segment_descriptor::text(2), segment_descriptor::image(gen::make_grid(1, 4, 4))});
    CHECK(vistok::max_position(mixed) == 5);
}

TEST_CASE("spatial ids cut position growth versus sequential numbering") {
    gen::engine rng(51);
    for (int i = 0; i < 50; ++i) {
        const auto segs = gen::random_layout(rng);
        const auto plan = vistok::assign_positions(segs);
        bool has_reducing_visual = false;
        for (const auto& s : segs)
            if (s.which != segment_descriptor::kind::text &&
                std::max({s.grid.grid_t, s.grid.grid_h, s.grid.grid_w}) < s.grid.tokens())
                has_reducing_visual = true;
        const int64_t one_d_max = static_cast<int64_t>(plan.triples.size()) - 1;
        if (has_reducing_visual) CHECK(vistok::max_position(plan) < one_d_max);
    }
}

TEST_CASE("plan text form lists one token per line") {
    const auto plan = vistok::assign_positions({segment_descriptor::text(2)});
    CHECK(plan.to_text() == "0 0 0 0\n1 1 1 1\n");
}

TEST_CASE("vision-encoder positions enumerate the patch grid row-major") {
    CHECK(vistok::assign_positions_2d(1, 1) ==
          std::vector<std::pair<int64_t, int64_t>>{{0, 0}});
    CHECK(vistok::assign_positions_2d(2, 2) ==
          std::vector<std::pair<int64_t, int64_t>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    const auto big = vistok::assign_positions_2d(16, 16);
    CHECK(big.size() == 256);
    CHECK(big.back() == std::pair<int64_t, int64_t>{15, 15});
    // Merged-grid overload counts pre-merge patches.
    const auto merged = vistok::assign_positions_2d(gen::make_grid(1, 8, 8), 2);
    CHECK(merged.size() == 256);
    CHECK(merged.back() == std::pair<int64_t, int64_t>{15, 15});
}

TEST_CASE("rotary angles follow the sectioned frequency table") {
    rotary_config cfg;
    cfg.head_dim = 8;
    cfg.section_t = 1;
    cfg.section_h = 1;
    cfg.section_w = 2;
    const auto angles = vistok::rotary_angles(tr(1, 2, 3), cfg);
    REQUIRE(angles.size() == 4);
    for (int k = 0; k < 4; ++k) {
        const double freq = std::pow(10000.0, -2.0 * k / 8.0);
        const double id = k == 0 ? 1.0 : (k == 1 ? 2.0 : 3.0);
        CHECK(angles[static_cast<size_t>(k)] == doctest::Approx(id * freq).epsilon(1e-15));
    }
}

TEST_CASE("zero positions produce zero angles and an identity rotation") {
    const rotary_config cfg;
    const auto angles = vistok::rotary_angles(tr(0, 0, 0), cfg);
    for (double a : angles) CHECK(a == 0.0);
    gen::engine rng(52);
    const auto v = gen::random_vector(rng, 64);
    CHECK(vistok::apply_rotary(v, tr(0, 0, 0), cfg) == v);
}

TEST_CASE("uniform triples reproduce plain 1D rotary") {
    gen::engine rng(53);
    const rotary_config cfg = rotary_config::with_default_sections(64);
    for (int64_t n : {0L, 1L, 7L, 500L, 16384L}) {
        const auto v = gen::random_vector(rng, 64);
        const auto ours = vistok::apply_rotary(v, tr(n, n, n), cfg);
        const auto ref = oracle::rotate_1d(v, n, cfg.theta);
        REQUIRE(ours.size() == ref.size());
        for (size_t i = 0; i < ours.size(); ++i)
            CHECK(ours[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
}

TEST_CASE("a quarter-turn angle rotates (1,0) onto (0,1)") {
    const std::vector<double> v = {1.0, 0.0};
    const auto out = vistok::apply_rotary_angles(v, {std::numbers::pi / 2});
    CHECK(out[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rotary application preserves the Euclidean norm") {
    gen::engine rng(54);
    const rotary_config cfg = rotary_config::with_default_sections(64);
    for (int i = 0; i < 500; ++i) {
        const auto v = gen::random_vector(rng, 64);
        const auto p = tr(gen::uniform_int(rng, 0, 100000), gen::uniform_int(rng, 0, 100000),
                          gen::uniform_int(rng, 0, 100000));
        const auto out = vistok::apply_rotary(v, p, cfg);
        double in_sq = 0.0, out_sq = 0.0;
        for (size_t k = 0; k < v.size(); ++k) {
            in_sq += v[k] * v[k];
            out_sq += out[k] * out[k];
        }
        CHECK(std::sqrt(out_sq) == doctest::Approx(std::sqrt(in_sq)).epsilon(1e-12));
    }
}

TEST_CASE("default section split gives h and w a sixth of the head each") {
    const auto cfg = rotary_config::with_default_sections(64);
    CHECK(cfg.section_t == 12);
    CHECK(cfg.section_h == 10);
    CHECK(cfg.section_w == 10);
    const auto small = rotary_config::with_default_sections(8);
    CHECK(small.section_t + small.section_h + small.section_w == 4);
    CHECK(small.section_h == small.section_w);
}

TEST_CASE("configuration and segment validation") {
    rotary_config odd;
    odd.head_dim = 63;
    CHECK_THROWS_AS(odd.validate(), mrope_error);
    rotary_config bad_sum;
    bad_sum.head_dim = 64;
    bad_sum.section_t = 30;
    bad_sum.section_h = 1;
    bad_sum.section_w = 2;
    CHECK_THROWS_AS(bad_sum.validate(), mrope_error);

    CHECK_THROWS_AS(static_cast<void>(segment_descriptor::text(0)), mrope_error);
    CHECK_THROWS_AS(static_cast<void>(segment_descriptor::image(gen::make_grid(2, 2, 2))),
                    mrope_error);
    CHECK_THROWS_AS(static_cast<void>(vistok::assign_positions({})), mrope_error);
    CHECK_THROWS_AS(static_cast<void>(vistok::assign_positions_2d(gen::make_grid(1, 2, 2), 0)),
                    mrope_error);

    gen::engine rng(55);
    const auto v = gen::random_vector(rng, 32);
    CHECK_THROWS_AS(static_cast<void>(vistok::apply_rotary(v, tr(0, 0, 0), rotary_config{})),
                    mrope_error);
}

TEST_CASE("assignment is deterministic") {
    gen::engine rng_a(56), rng_b(56);
    for (int i = 0; i < 20; ++i) {
        const auto segs_a = gen::random_layout(rng_a);
        const auto segs_b = gen::random_layout(rng_b);
        const auto plan_a = vistok::assign_positions(segs_a);
        const auto plan_b = vistok::assign_positions(segs_b);
        CHECK(plan_a.triples == plan_b.triples);
        CHECK(plan_a.segment_spans == plan_b.segment_spans);
    }
}

TEST_SUITE_END();
