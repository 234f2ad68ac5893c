#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vistok {

// Sides whose ratio exceeds this are rejected outright.
inline constexpr int64_t k_max_aspect_ratio = 200;

// Pixel-budget and patch-geometry parameters shared by all planning calls.
// Target dimensions are always multiples of patch_size * merge_size.
struct resize_spec {
    int64_t patch_size = 14;
    int64_t merge_size = 2;
    int64_t min_pixels = 56 * 56;            // floor of four merged tokens
    int64_t max_pixels = 16384LL * 28 * 28;  // cap of 16384 merged tokens
    int64_t video_token_budget = 16384;
    double sample_fps = 2.0;
    int64_t temporal_patch = 2;

    int64_t align_factor() const { return patch_size * merge_size; }
    void validate() const;
};

struct resize_plan {
    int64_t source_h = 0;
    int64_t source_w = 0;
    int64_t target_h = 0;
    int64_t target_w = 0;
    // Video-only fields. padded_frame_count is a multiple of temporal_patch;
    // padding repeats the last sampled frame.
    std::vector<int64_t> sampled_frame_indices;
    int64_t padded_frame_count = 0;
};

struct token_count {
    int64_t patches = 0;
    int64_t merged = 0;
    int64_t with_delimiters = 0;  // merged plus the two vision delimiters
};

struct resize_error : std::runtime_error {
    enum class kind {
        invalid_spec,
        invalid_input,
        aspect_ratio_too_extreme,
        infeasible_bounds,
        misaligned_dimensions,
    };
    resize_error(kind k, const std::string& msg) : std::runtime_error(msg), which(k) {}
    kind which;
};

// Aspect-preserving resize to aligned dimensions inside [min_pixels, max_pixels].
// Each side is rounded to the nearest multiple of the align factor (half up);
// if the area then exceeds max_pixels both sides are scaled by
// sqrt(max_pixels / (h*w)) and floor-aligned, and if it falls short of
// min_pixels they are scaled by sqrt(min_pixels / (h*w)) and ceil-aligned.
// Sides are clamped to at least one factor. Idempotent on its own output.
std::pair<int64_t, int64_t> smart_resize(int64_t h, int64_t w, const resize_spec& spec = {});

// Patch and merged-token counts for already-aligned target dimensions.
token_count count_tokens(int64_t target_h, int64_t target_w, const resize_spec& spec = {});

// Aligned dimensions whose merged token count is as close as possible to
// n_merged_tokens. Ties prefer the grid whose aspect is nearest h:w, then the
// smaller area, then the smaller height.
std::pair<int64_t, int64_t> fixed_token_resize(int64_t h, int64_t w, int64_t n_merged_tokens,
                                               const resize_spec& spec = {});

resize_plan plan_image(int64_t h, int64_t w, const resize_spec& spec = {});

// Samples frames at spec.sample_fps, pads to a multiple of temporal_patch and
// picks one uniform frame geometry such that the total merged token count
// stays within video_token_budget. When the budget squeezes the per-frame
// pixel cap below min_pixels the cap wins and the lower bound is dropped to a
// single merged token per frame.
resize_plan plan_video(int64_t frame_count, double native_fps, int64_t h, int64_t w,
                       const resize_spec& spec = {});

}  // namespace vistok
