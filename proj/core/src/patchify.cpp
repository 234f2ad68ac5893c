#include "vistok/patchify.hpp"

#include <cmath>

namespace vistok {

namespace {

void check_buffer(const pixel_buffer& img) {
    if (img.height < 1 || img.width < 1 || img.channels < 1)
        throw patchify_error(patchify_error::kind::invalid_buffer, "empty pixel buffer");
    if (img.data.size() != static_cast<size_t>(img.height * img.width * img.channels))
        throw patchify_error(patchify_error::kind::invalid_buffer,
                             "buffer size does not match dimensions");
}

// Copies one merged token worth of patches out of per-tube source frames.
void emit_token(const pixel_buffer* const* frames, int64_t temporal, int64_t r, int64_t c,
                const resize_spec& spec, float* dst) {
    const int64_t p = spec.patch_size;
    const int64_t m = spec.merge_size;
    size_t o = 0;
    for (int64_t t = 0; t < temporal; ++t) {
        const pixel_buffer& fr = *frames[t];
        for (int64_t mr = 0; mr < m; ++mr) {
            for (int64_t mc = 0; mc < m; ++mc) {
                const int64_t y0 = (r * m + mr) * p;
                const int64_t x0 = (c * m + mc) * p;
                for (int64_t ch = 0; ch < fr.channels; ++ch)
                    for (int64_t pr = 0; pr < p; ++pr)
                        for (int64_t pc = 0; pc < p; ++pc)
                            dst[o++] = fr.at(y0 + pr, x0 + pc, ch);
            }
        }
    }
}

patch_grid cut_tokens(const std::vector<pixel_buffer>& resampled, int64_t grid_t,
                      const resize_plan& plan, const resize_spec& spec) {
    const int64_t f = spec.align_factor();
    patch_grid grid;
    grid.grid_t = grid_t;
    grid.grid_h = plan.target_h / f;
    grid.grid_w = plan.target_w / f;
    grid.token_dim = spec.temporal_patch * spec.merge_size * spec.merge_size *
                     resampled.front().channels * spec.patch_size * spec.patch_size;
    grid.patch_vectors.resize(static_cast<size_t>(grid.tokens() * grid.token_dim));

    const int64_t last = static_cast<int64_t>(resampled.size()) - 1;
    std::vector<const pixel_buffer*> tube(static_cast<size_t>(spec.temporal_patch));
    for (int64_t t = 0; t < grid_t; ++t) {
        for (int64_t tt = 0; tt < spec.temporal_patch; ++tt)
            tube[static_cast<size_t>(tt)] =
                &resampled[static_cast<size_t>(std::min(t * spec.temporal_patch + tt, last))];
        for (int64_t r = 0; r < grid.grid_h; ++r)
            for (int64_t c = 0; c < grid.grid_w; ++c) {
                const int64_t token = (t * grid.grid_h + r) * grid.grid_w + c;
                emit_token(tube.data(), spec.temporal_patch, r, c, spec,
                           grid.patch_vectors.data() + token * grid.token_dim);
            }
    }
    return grid;
}

void check_plan(const resize_plan& plan, const resize_spec& spec) {
    const int64_t f = spec.align_factor();
    if (plan.target_h < f || plan.target_w < f || plan.target_h % f != 0 || plan.target_w % f != 0)
        throw patchify_error(patchify_error::kind::dimension_mismatch,
                             "plan target dimensions are not aligned");
}

}  // namespace

pixel_buffer resample(const pixel_buffer& src, int64_t target_h, int64_t target_w) {
    check_buffer(src);
    if (target_h < 1 || target_w < 1)
        throw patchify_error(patchify_error::kind::dimension_mismatch,
                             "target dimensions must be >= 1");
    if (target_h == src.height && target_w == src.width) return src;

    pixel_buffer out(target_h, target_w, src.channels);
    const double sy_step =
        target_h == 1 ? 0.0 : static_cast<double>(src.height - 1) / static_cast<double>(target_h - 1);
    const double sx_step =
        target_w == 1 ? 0.0 : static_cast<double>(src.width - 1) / static_cast<double>(target_w - 1);
    for (int64_t y = 0; y < target_h; ++y) {
        const double sy = static_cast<double>(y) * sy_step;
        const int64_t y0 = static_cast<int64_t>(std::floor(sy));
        const int64_t y1 = std::min(y0 + 1, src.height - 1);
        const float fy = static_cast<float>(sy - static_cast<double>(y0));
        for (int64_t x = 0; x < target_w; ++x) {
            const double sx = static_cast<double>(x) * sx_step;
            const int64_t x0 = static_cast<int64_t>(std::floor(sx));
            const int64_t x1 = std::min(x0 + 1, src.width - 1);
            const float fx = static_cast<float>(sx - static_cast<double>(x0));
            for (int64_t c = 0; c < src.channels; ++c) {
                const float top = src.at(y0, x0, c) * (1.0f - fx) + src.at(y0, x1, c) * fx;
                const float bot = src.at(y1, x0, c) * (1.0f - fx) + src.at(y1, x1, c) * fx;
                out.at(y, x, c) = top * (1.0f - fy) + bot * fy;
            }
        }
    }
    return out;
}

patch_grid patchify_image(const pixel_buffer& img, const resize_plan& plan,
                          const resize_spec& spec) {
    spec.validate();
    check_buffer(img);
    check_plan(plan, spec);
    if (img.height != plan.source_h || img.width != plan.source_w)
        throw patchify_error(patchify_error::kind::dimension_mismatch,
                             "buffer dimensions do not match the plan source");
    std::vector<pixel_buffer> frames;
    frames.push_back(resample(img, plan.target_h, plan.target_w));
    return cut_tokens(frames, 1, plan, spec);
}

patch_grid patchify_video(const std::vector<pixel_buffer>& frames, const resize_plan& plan,
                          const resize_spec& spec) {
    spec.validate();
    check_plan(plan, spec);
    if (frames.empty())
        throw patchify_error(patchify_error::kind::dimension_mismatch, "no frames supplied");
    if (plan.padded_frame_count < 1 || plan.padded_frame_count % spec.temporal_patch != 0)
        throw patchify_error(patchify_error::kind::dimension_mismatch,
                             "plan does not describe a padded video");

    const int64_t n = static_cast<int64_t>(frames.size());
    const int64_t sampled = static_cast<int64_t>(plan.sampled_frame_indices.size());
    if (n != plan.padded_frame_count && n != sampled)
        throw patchify_error(patchify_error::kind::dimension_mismatch,
                             "frame count matches neither the sampled nor the padded count");

    for (const auto& fr : frames) {
        check_buffer(fr);
        if (fr.height != frames.front().height || fr.width != frames.front().width ||
            fr.channels != frames.front().channels)
            throw patchify_error(patchify_error::kind::non_uniform_frames,
                                 "frames differ in dimensions");
    }
    if (frames.front().height != plan.source_h || frames.front().width != plan.source_w)
        throw patchify_error(patchify_error::kind::dimension_mismatch,
                             "frame dimensions do not match the plan source");

    std::vector<pixel_buffer> resampled;
    resampled.reserve(frames.size());
    for (const auto& fr : frames) resampled.push_back(resample(fr, plan.target_h, plan.target_w));
    return cut_tokens(resampled, plan.padded_frame_count / spec.temporal_patch, plan, spec);
}

}  // namespace vistok
