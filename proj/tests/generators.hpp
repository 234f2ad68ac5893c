// Seeded random inputs for property tests. Everything takes an explicit
// engine so each test controls its own seed and stays reproducible.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "vistok/chatml.hpp"
#include "vistok/mrope.hpp"

namespace gen {

using engine = std::mt19937_64;

inline int64_t uniform_int(engine& rng, int64_t lo, int64_t hi) {
    return std::uniform_int_distribution<int64_t>(lo, hi)(rng);
}

inline double uniform_real(engine& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Source extents with a workable aspect ratio (the planner rejects > 200:1).
inline std::pair<int64_t, int64_t> random_extents(engine& rng, int64_t side_max = 20000) {
    const int64_t h = uniform_int(rng, 1, side_max);
    const int64_t lo = std::max<int64_t>(1, (h + 199) / 200);
    const int64_t hi = std::min(side_max, h * 200);
    return {h, uniform_int(rng, lo, hi)};
}

inline std::vector<double> random_vector(engine& rng, size_t dim) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> v(dim);
    for (auto& x : v) x = n(rng);
    return v;
}

inline std::vector<std::vector<double>> random_matrix(engine& rng, size_t rows, size_t dim) {
    std::vector<std::vector<double>> m(rows);
    for (auto& row : m) row = random_vector(rng, dim);
    return m;
}

inline vistok::patch_grid make_grid(int64_t t, int64_t h, int64_t w) {
    vistok::patch_grid g;
    g.grid_t = t;
    g.grid_h = h;
    g.grid_w = w;
    return g;
}

// Mixed text/image/video layout for position-assignment tests.
inline std::vector<vistok::segment_descriptor> random_layout(engine& rng, int max_segments = 6,
                                                             int64_t grid_cap = 8) {
    const int count = static_cast<int>(uniform_int(rng, 1, max_segments));
    std::vector<vistok::segment_descriptor> segs;
    for (int i = 0; i < count; ++i) {
        switch (uniform_int(rng, 0, 2)) {
            case 0:
                segs.push_back(vistok::segment_descriptor::text(uniform_int(rng, 1, 40)));
                break;
            case 1:
                segs.push_back(vistok::segment_descriptor::image(
                    make_grid(1, uniform_int(rng, 1, grid_cap), uniform_int(rng, 1, grid_cap))));
                break;
            default:
                segs.push_back(vistok::segment_descriptor::video(
                    make_grid(uniform_int(rng, 1, 4), uniform_int(rng, 1, grid_cap),
                              uniform_int(rng, 1, grid_cap))));
        }
    }
    return segs;
}

// --- canonical conversations -----------------------------------------------
//
// The serializer round-trips only canonical message lists: maximal non-empty
// text runs, media paths whose extension matches their kind, text before an
// agent step ending in a newline, and nothing after the last step of a turn.
// The generators below construct exactly that shape. Plain text avoids '*'
// and '<' so no keyword or delimiter can appear by accident.

inline std::string random_plain_text(engine& rng, int min_len = 1, int max_len = 24,
                                     bool allow_newline = true) {
    static constexpr char alphabet[] =
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .,!?()-:;'\"/{}";
    const int len = static_cast<int>(uniform_int(rng, min_len, max_len));
    std::string s;
    s.reserve(static_cast<size_t>(len));
    for (int i = 0; i < len; ++i) {
        if (allow_newline && uniform_int(rng, 0, 15) == 0 && !s.empty() && s.back() != '\n') {
            s.push_back('\n');
            continue;
        }
        s.push_back(alphabet[static_cast<size_t>(uniform_int(rng, 0, sizeof(alphabet) - 2))]);
    }
    if (s.empty()) s = "x";
    return s;
}

inline std::string random_word(engine& rng, int min_len = 3, int max_len = 10) {
    static constexpr char alphabet[] = "abcdefghijklmnopqrstuvwxyz";
    const int len = static_cast<int>(uniform_int(rng, min_len, max_len));
    std::string s;
    for (int i = 0; i < len; ++i)
        s.push_back(alphabet[static_cast<size_t>(uniform_int(rng, 0, 25))]);
    return s;
}

// Argument strings have no escape syntax, so a '"' can never round-trip.
inline std::string random_arg_string(engine& rng, int min_len = 1, int max_len = 12) {
    static constexpr char alphabet[] =
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .,!?()-:;'/{}";
    const int len = static_cast<int>(uniform_int(rng, min_len, max_len));
    std::string s;
    s.reserve(static_cast<size_t>(len));
    for (int i = 0; i < len; ++i)
        s.push_back(alphabet[static_cast<size_t>(uniform_int(rng, 0, sizeof(alphabet) - 2))]);
    return s;
}

inline std::string random_image_path(engine& rng) { return random_word(rng) + ".jpg"; }

inline std::string random_video_path(engine& rng) {
    static const char* exts[] = {".mp4", ".avi", ".mov", ".mkv", ".webm", ".m4v"};
    return random_word(rng) + exts[uniform_int(rng, 0, 5)];
}

inline vistok::normalized_box random_box(engine& rng) {
    vistok::normalized_box b;
    b.x0 = static_cast<int>(uniform_int(rng, 0, 998));
    b.y0 = static_cast<int>(uniform_int(rng, 0, 998));
    b.x1 = static_cast<int>(uniform_int(rng, b.x0, 999));
    b.y1 = static_cast<int>(uniform_int(rng, b.y0, 999));
    return b;
}

inline vistok::arg_map random_args(engine& rng) {
    vistok::arg_map args;
    const int n = static_cast<int>(uniform_int(rng, 0, 3));
    for (int i = 0; i < n; ++i) {
        const std::string key = random_word(rng) + std::to_string(i);
        switch (uniform_int(rng, 0, 2)) {
            case 0:
                args.emplace_back(key, vistok::arg_value::integer(uniform_int(rng, -9999, 9999)));
                break;
            case 1:
                args.emplace_back(key, vistok::arg_value::str(random_arg_string(rng)));
                break;
            default:
                args.emplace_back(key, vistok::arg_value::point(uniform_int(rng, 0, 1999),
                                                                uniform_int(rng, 0, 1999)));
        }
    }
    return args;
}

// Non-step content: text runs never adjacent to each other.
inline std::vector<vistok::segment> random_plain_segments(engine& rng, int min_count = 1,
                                                          int max_count = 4) {
    const int count = static_cast<int>(uniform_int(rng, min_count, max_count));
    std::vector<vistok::segment> segs;
    bool last_was_text = false;
    for (int i = 0; i < count; ++i) {
        int kind = static_cast<int>(uniform_int(rng, 0, 3));
        if (kind == 0 && last_was_text) kind = 1;
        switch (kind) {
            case 0:
                segs.push_back(vistok::segment::text(random_plain_text(rng)));
                last_was_text = true;
                break;
            case 1:
                segs.push_back(vistok::segment::image(random_image_path(rng)));
                last_was_text = false;
                break;
            case 2:
                segs.push_back(vistok::segment::video(random_video_path(rng)));
                last_was_text = false;
                break;
            default:
                segs.push_back(
                    vistok::segment::object(random_plain_text(rng, 1, 12, false), random_box(rng)));
                last_was_text = false;
                break;
        }
    }
    return segs;
}

inline vistok::agent_step random_agent_step(engine& rng, bool allow_empty_return) {
    vistok::agent_step st;
    st.function = random_word(rng);
    st.args = random_args(rng);
    st.result = random_plain_segments(rng, 1, 2);
    if (!allow_empty_return || uniform_int(rng, 0, 3) != 0)
        st.return_text = random_plain_text(rng, 1, 16, false);
    return st;
}

// Assistant content that may end in a run of agent steps. A text segment
// directly before the first step must end with '\n' so the step starts a line.
inline std::vector<vistok::segment> random_assistant_segments(engine& rng) {
    std::vector<vistok::segment> segs;
    if (uniform_int(rng, 0, 1) == 0) {
        std::string lead = random_plain_text(rng);
        if (lead.back() != '\n') lead.push_back('\n');
        segs.push_back(vistok::segment::text(lead));
    }
    const int steps = static_cast<int>(uniform_int(rng, 0, 3));
    for (int i = 0; i < steps; ++i)
        segs.push_back(vistok::segment::step(random_agent_step(rng, i + 1 == steps)));
    if (steps == 0) {
        if (segs.empty() || uniform_int(rng, 0, 1) == 0)
            segs.push_back(vistok::segment::image(random_image_path(rng)));
        else
            segs.back() = vistok::segment::text(random_plain_text(rng));
    }
    return segs;
}

inline std::vector<vistok::message> random_conversation(engine& rng, int max_turns = 5) {
    std::vector<vistok::message> msgs;
    if (uniform_int(rng, 0, 2) == 0)
        msgs.push_back({vistok::role::system, {vistok::segment::text(random_plain_text(rng))}});
    const int turns = static_cast<int>(uniform_int(rng, 1, max_turns));
    for (int i = 0; i < turns; ++i) {
        msgs.push_back({vistok::role::user, random_plain_segments(rng)});
        msgs.push_back({vistok::role::assistant, random_assistant_segments(rng)});
    }
    return msgs;
}

}  // namespace gen
