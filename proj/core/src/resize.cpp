#include "vistok/resize.hpp"

#include <algorithm>
#include <cmath>

namespace vistok {

namespace {

int64_t ceil_div(int64_t a, int64_t b) { return (a + b - 1) / b; }

int64_t align_nearest(double v, int64_t f) {
    return static_cast<int64_t>(std::floor(v / static_cast<double>(f) + 0.5)) * f;
}

int64_t align_floor(double v, int64_t f) {
    return static_cast<int64_t>(std::floor(v / static_cast<double>(f))) * f;
}

int64_t align_ceil(double v, int64_t f) {
    return static_cast<int64_t>(std::ceil(v / static_cast<double>(f))) * f;
}

// Closest-aspect aligned rectangle with unit area in [q_min, q_max], used only
// when the scaling rule cannot satisfy unusually tight custom bounds. Ties go
// to the smaller area, then the smaller height.
std::pair<int64_t, int64_t> bounded_aspect_search(int64_t h, int64_t w, int64_t q_min,
                                                  int64_t q_max, int64_t f) {
    const double target = std::log(static_cast<double>(h) / static_cast<double>(w));
    const int64_t a_cap = std::min<int64_t>(q_max, int64_t{1} << 20);
    bool found = false;
    double best_dev = 0.0;
    int64_t best_a = 0, best_b = 0;
    for (int64_t a = 1; a <= a_cap; ++a) {
        const int64_t b_lo = std::max<int64_t>(1, ceil_div(q_min, a));
        const int64_t b_hi = q_max / a;
        if (b_lo > b_hi) continue;
        // Candidates must also stay inside the aspect cap, or the result
        // would not be a legal input to this function.
        const int64_t b_cap_lo = std::max(b_lo, ceil_div(a, k_max_aspect_ratio));
        const int64_t b_cap_hi = std::min(b_hi, a * k_max_aspect_ratio);
        if (b_cap_lo > b_cap_hi) continue;
        const double ideal = static_cast<double>(a) * static_cast<double>(w) / static_cast<double>(h);
        for (int64_t b : {static_cast<int64_t>(std::floor(ideal)), static_cast<int64_t>(std::ceil(ideal))}) {
            b = std::clamp(b, b_cap_lo, b_cap_hi);
            const double dev = std::abs(std::log(static_cast<double>(a) / static_cast<double>(b)) - target);
            const bool better =
                !found || dev < best_dev ||
                (dev == best_dev && (a * b < best_a * best_b || (a * b == best_a * best_b && a < best_a)));
            if (better) {
                found = true;
                best_dev = dev;
                best_a = a;
                best_b = b;
            }
        }
    }
    if (!found)
        throw resize_error(resize_error::kind::infeasible_bounds,
                           "no aligned rectangle fits the pixel bounds");
    return {best_a * f, best_b * f};
}

}  // namespace

void resize_spec::validate() const {
    if (patch_size < 1 || merge_size < 1)
        throw resize_error(resize_error::kind::invalid_spec, "patch_size and merge_size must be >= 1");
    if (min_pixels < 0 || max_pixels < 1 || min_pixels > max_pixels)
        throw resize_error(resize_error::kind::invalid_spec, "need 0 <= min_pixels <= max_pixels");
    if (video_token_budget < 1)
        throw resize_error(resize_error::kind::invalid_spec, "video_token_budget must be >= 1");
    if (!(sample_fps > 0.0) || !std::isfinite(sample_fps))
        throw resize_error(resize_error::kind::invalid_spec, "sample_fps must be positive");
    if (temporal_patch < 1)
        throw resize_error(resize_error::kind::invalid_spec, "temporal_patch must be >= 1");
}

std::pair<int64_t, int64_t> smart_resize(int64_t h, int64_t w, const resize_spec& spec) {
    spec.validate();
    if (h < 1 || w < 1)
        throw resize_error(resize_error::kind::invalid_input, "dimensions must be >= 1");
    if (std::max(h, w) > k_max_aspect_ratio * std::min(h, w))
        throw resize_error(resize_error::kind::aspect_ratio_too_extreme,
                           "aspect ratio exceeds " + std::to_string(k_max_aspect_ratio) + ":1");

    const int64_t f = spec.align_factor();
    const int64_t f2 = f * f;
    const int64_t q_min = std::max<int64_t>(1, ceil_div(spec.min_pixels, f2));
    const int64_t q_max = spec.max_pixels / f2;
    if (q_max < q_min)
        throw resize_error(resize_error::kind::infeasible_bounds,
                           "no aligned rectangle fits the pixel bounds");

    const double hw = static_cast<double>(h) * static_cast<double>(w);
    int64_t hb = std::max(f, align_nearest(static_cast<double>(h), f));
    int64_t wb = std::max(f, align_nearest(static_cast<double>(w), f));
    if (hb * wb > spec.max_pixels) {
        const double s = std::sqrt(static_cast<double>(spec.max_pixels) / hw);
        hb = std::max(f, align_floor(static_cast<double>(h) * s, f));
        wb = std::max(f, align_floor(static_cast<double>(w) * s, f));
    } else if (hb * wb < spec.min_pixels) {
        const double s = std::sqrt(static_cast<double>(spec.min_pixels) / hw);
        hb = std::max(f, align_ceil(static_cast<double>(h) * s, f));
        wb = std::max(f, align_ceil(static_cast<double>(w) * s, f));
    }
    // Rounding can push a near-limit ratio past the cap; pull the long side
    // back so the output is itself a legal input (idempotence).
    if (hb > k_max_aspect_ratio * wb)
        hb = align_floor(static_cast<double>(k_max_aspect_ratio * wb), f);
    else if (wb > k_max_aspect_ratio * hb)
        wb = align_floor(static_cast<double>(k_max_aspect_ratio * hb), f);
    if (hb * wb >= spec.min_pixels && hb * wb <= spec.max_pixels) return {hb, wb};
    return bounded_aspect_search(h, w, q_min, q_max, f);
}

token_count count_tokens(int64_t target_h, int64_t target_w, const resize_spec& spec) {
    spec.validate();
    const int64_t f = spec.align_factor();
    if (target_h < f || target_w < f || target_h % f != 0 || target_w % f != 0)
        throw resize_error(resize_error::kind::misaligned_dimensions,
                           "dimensions must be positive multiples of " + std::to_string(f));
    token_count tc;
    tc.patches = (target_h / spec.patch_size) * (target_w / spec.patch_size);
    tc.merged = tc.patches / (spec.merge_size * spec.merge_size);
    tc.with_delimiters = tc.merged + 2;
    return tc;
}

std::pair<int64_t, int64_t> fixed_token_resize(int64_t h, int64_t w, int64_t n_merged_tokens,
                                               const resize_spec& spec) {
    spec.validate();
    if (h < 1 || w < 1)
        throw resize_error(resize_error::kind::invalid_input, "dimensions must be >= 1");
    if (n_merged_tokens < 1)
        throw resize_error(resize_error::kind::invalid_input, "token target must be >= 1");

    const int64_t f = spec.align_factor();
    const int64_t n = n_merged_tokens;
    const double target = std::log(static_cast<double>(h) / static_cast<double>(w));
    bool found = false;
    int64_t best_dist = 0, best_gh = 0, best_gw = 0;
    double best_dev = 0.0;
    for (int64_t gh = 1; gh <= n; ++gh) {
        for (int64_t gw : {n / gh, ceil_div(n, gh)}) {
            if (gw < 1) gw = 1;
            const int64_t dist = std::abs(gh * gw - n);
            const double dev =
                std::abs(std::log(static_cast<double>(gh) / static_cast<double>(gw)) - target);
            const bool better =
                !found || dist < best_dist ||
                (dist == best_dist &&
                 (dev < best_dev ||
                  (dev == best_dev && (gh * gw < best_gh * best_gw ||
                                       (gh * gw == best_gh * best_gw && gh < best_gh)))));
            if (better) {
                found = true;
                best_dist = dist;
                best_dev = dev;
                best_gh = gh;
                best_gw = gw;
            }
        }
    }
    return {best_gh * f, best_gw * f};
}

resize_plan plan_image(int64_t h, int64_t w, const resize_spec& spec) {
    auto [th, tw] = smart_resize(h, w, spec);
    resize_plan plan;
    plan.source_h = h;
    plan.source_w = w;
    plan.target_h = th;
    plan.target_w = tw;
    return plan;
}

resize_plan plan_video(int64_t frame_count, double native_fps, int64_t h, int64_t w,
                       const resize_spec& spec) {
    spec.validate();
    if (frame_count < 1)
        throw resize_error(resize_error::kind::invalid_input, "frame_count must be >= 1");
    if (!(native_fps > 0.0) || !std::isfinite(native_fps))
        throw resize_error(resize_error::kind::invalid_input, "native_fps must be positive");

    // One sample per 1/sample_fps seconds of footage; indices round to the
    // nearest source frame and collapse when the source is slower than the
    // sampling rate.
    const double samples_exact = static_cast<double>(frame_count) * spec.sample_fps / native_fps;
    const int64_t raw = std::max<int64_t>(1, static_cast<int64_t>(std::ceil(samples_exact - 1e-9)));
    std::vector<int64_t> indices;
    indices.reserve(static_cast<size_t>(raw));
    for (int64_t k = 0; k < raw; ++k) {
        int64_t idx = std::llround(static_cast<double>(k) * native_fps / spec.sample_fps);
        idx = std::clamp<int64_t>(idx, 0, frame_count - 1);
        if (indices.empty() || indices.back() != idx) indices.push_back(idx);
    }

    const int64_t sampled = static_cast<int64_t>(indices.size());
    const int64_t padded = ceil_div(sampled, spec.temporal_patch) * spec.temporal_patch;
    const int64_t tubes = padded / spec.temporal_patch;
    if (tubes > spec.video_token_budget)
        throw resize_error(resize_error::kind::infeasible_bounds,
                           "video needs more than one merged token per frame pair to fit the budget");

    const int64_t f2 = spec.align_factor() * spec.align_factor();
    resize_spec per_frame = spec;
    per_frame.max_pixels = std::min(spec.max_pixels, (spec.video_token_budget / tubes) * f2);
    if (per_frame.min_pixels > per_frame.max_pixels) per_frame.min_pixels = f2;

    auto [th, tw] = smart_resize(h, w, per_frame);
    resize_plan plan;
    plan.source_h = h;
    plan.source_w = w;
    plan.target_h = th;
    plan.target_w = tw;
    plan.sampled_frame_indices = std::move(indices);
    plan.padded_frame_count = padded;
    return plan;
}

}  // namespace vistok
