#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vistok/grid.hpp"

namespace vistok {

// (temporal, height, width) position IDs for one token. Text tokens carry the
// same value in all three components.
struct position_triple {
    int64_t t = 0;
    int64_t h = 0;
    int64_t w = 0;

    int64_t max_component() const { return t > h ? (t > w ? t : w) : (h > w ? h : w); }
    friend bool operator==(const position_triple&, const position_triple&) = default;
};

struct segment_descriptor {
    enum class kind { text, image, video };
    kind which = kind::text;
    int64_t length = 0;  // text only
    patch_grid grid;     // image/video only

    static segment_descriptor text(int64_t length);
    static segment_descriptor image(const patch_grid& grid);
    static segment_descriptor video(const patch_grid& grid);
};

struct position_plan {
    std::vector<position_triple> triples;
    // Half-open [begin, end) token ranges, one per input segment.
    std::vector<std::pair<size_t, size_t>> segment_spans;

    // One "idx t h w" line per token.
    std::string to_text() const;
};

struct mrope_error : std::runtime_error {
    enum class kind { invalid_segment, invalid_config, length_mismatch, empty_plan };
    mrope_error(kind k, const std::string& msg) : std::runtime_error(msg), which(k) {}
    kind which;
};

// Rotary geometry: head_dim/2 rotation pairs partitioned into sections driven
// by the t, h and w components. Pair k always uses frequency
// theta^(-2k / head_dim) regardless of which section it belongs to, so a plan
// whose triples are all (n, n, n) reproduces plain 1D rotary at position n.
struct rotary_config {
    int64_t head_dim = 64;
    double theta = 10000.0;
    int64_t section_t = 12;
    int64_t section_h = 10;
    int64_t section_w = 10;

    // head_dim/6 pairs (rounded down) for h and w each, remainder to t.
    static rotary_config with_default_sections(int64_t head_dim, double theta = 10000.0);
    void validate() const;
};

// Sequential IDs for text, spatial IDs for images, spatio-temporal IDs for
// videos. Each segment starts at one past the maximum component used by the
// tokens before it (0 for the first).
position_plan assign_positions(const std::vector<segment_descriptor>& segments);

int64_t max_position(const position_plan& plan);

// Row-major (row, col) pairs over a pre-merge patch grid, as used inside the
// vision encoder. For a merged grid scale the sides by merge_size first.
std::vector<std::pair<int64_t, int64_t>> assign_positions_2d(int64_t patch_rows,
                                                             int64_t patch_cols);

// Convenience for a merged grid: enumerates the pre-merge patch positions,
// i.e. merge_size * grid_h rows by merge_size * grid_w columns per tube.
std::vector<std::pair<int64_t, int64_t>> assign_positions_2d(const patch_grid& grid,
                                                             int64_t merge_size);

std::vector<double> rotary_angles(const position_triple& p, const rotary_config& cfg);

// Rotates interleaved pairs (v[2k], v[2k+1]) by angles[k]. Norm-preserving.
std::vector<double> apply_rotary_angles(const std::vector<double>& v,
                                        const std::vector<double>& angles);

std::vector<double> apply_rotary(const std::vector<double>& v, const position_triple& p,
                                 const rotary_config& cfg);

}  // namespace vistok
