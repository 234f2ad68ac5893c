#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vistok/grid.hpp"
#include "vistok/resize.hpp"

namespace vistok {

// Row-major interleaved H x W x C buffer with intensities in [0, 1].
struct pixel_buffer {
    int64_t height = 0;
    int64_t width = 0;
    int64_t channels = 3;
    std::vector<float> data;

    pixel_buffer() = default;
    pixel_buffer(int64_t h, int64_t w, int64_t c)
        : height(h), width(w), channels(c), data(static_cast<size_t>(h * w * c), 0.0f) {}

    float& at(int64_t y, int64_t x, int64_t c) {
        return data[static_cast<size_t>((y * width + x) * channels + c)];
    }
    float at(int64_t y, int64_t x, int64_t c) const {
        return data[static_cast<size_t>((y * width + x) * channels + c)];
    }
};

struct patchify_error : std::runtime_error {
    enum class kind { invalid_buffer, dimension_mismatch, non_uniform_frames };
    patchify_error(kind k, const std::string& msg) : std::runtime_error(msg), which(k) {}
    kind which;
};

// Bilinear resample with corner-aligned sampling: output index i maps to
// source coordinate i * (src - 1) / (dst - 1), or 0 when dst == 1. Identity
// targets return a bitwise-equal copy.
pixel_buffer resample(const pixel_buffer& src, int64_t target_h, int64_t target_w);

// Resamples to the plan's target dimensions and cuts merged tokens. A still
// image contributes temporal_patch identical copies of itself, so the result
// is identical to a video of one frame padded to a full tube. Each token
// vector concatenates its constituent patches in (temporal, merge-row,
// merge-col) order; a single patch flattens as (channel, row, col).
patch_grid patchify_image(const pixel_buffer& img, const resize_plan& plan,
                          const resize_spec& spec = {});

// frames must already be sampled per the plan: either exactly
// padded_frame_count buffers, or the sampled count with padding left to this
// call (the last frame repeats).
patch_grid patchify_video(const std::vector<pixel_buffer>& frames, const resize_plan& plan,
                          const resize_spec& spec = {});

}  // namespace vistok
