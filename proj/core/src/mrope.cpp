#include "vistok/mrope.hpp"

#include <algorithm>
#include <cmath>

namespace vistok {

segment_descriptor segment_descriptor::text(int64_t length) {
    if (length < 1)
        throw mrope_error(mrope_error::kind::invalid_segment, "text segment needs length >= 1");
    segment_descriptor d;
    d.which = kind::text;
    d.length = length;
    return d;
}

segment_descriptor segment_descriptor::image(const patch_grid& grid) {
    if (grid.grid_t != 1)
        throw mrope_error(mrope_error::kind::invalid_segment, "image grids have grid_t == 1");
    if (grid.grid_h < 1 || grid.grid_w < 1)
        throw mrope_error(mrope_error::kind::invalid_segment, "grid sides must be >= 1");
    segment_descriptor d;
    d.which = kind::image;
    d.grid = grid;
    return d;
}

segment_descriptor segment_descriptor::video(const patch_grid& grid) {
    if (grid.grid_t < 1 || grid.grid_h < 1 || grid.grid_w < 1)
        throw mrope_error(mrope_error::kind::invalid_segment, "grid sides must be >= 1");
    segment_descriptor d;
    d.which = kind::video;
    d.grid = grid;
    return d;
}

std::string position_plan::to_text() const {
    std::string out;
    for (size_t i = 0; i < triples.size(); ++i) {
        out += std::to_string(i);
        out += ' ';
        out += std::to_string(triples[i].t);
        out += ' ';
        out += std::to_string(triples[i].h);
        out += ' ';
        out += std::to_string(triples[i].w);
        out += '\n';
    }
    return out;
}

rotary_config rotary_config::with_default_sections(int64_t head_dim, double theta) {
    rotary_config cfg;
    cfg.head_dim = head_dim;
    cfg.theta = theta;
    const int64_t pairs = head_dim / 2;
    cfg.section_h = cfg.section_w = head_dim / 6;
    cfg.section_t = pairs - 2 * cfg.section_h;
    cfg.validate();
    return cfg;
}

void rotary_config::validate() const {
    if (head_dim < 2 || head_dim % 2 != 0)
        throw mrope_error(mrope_error::kind::invalid_config, "head_dim must be even and >= 2");
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw mrope_error(mrope_error::kind::invalid_config, "theta must be positive");
    if (section_t < 1 || section_h < 1 || section_w < 1)
        throw mrope_error(mrope_error::kind::invalid_config, "sections must be positive");
    if (section_t + section_h + section_w != head_dim / 2)
        throw mrope_error(mrope_error::kind::invalid_config, "sections must sum to head_dim / 2");
}

position_plan assign_positions(const std::vector<segment_descriptor>& segments) {
    if (segments.empty())
        throw mrope_error(mrope_error::kind::empty_plan, "segment list is empty");

    position_plan plan;
    int64_t max_seen = -1;
    for (const auto& seg : segments) {
        const int64_t base = max_seen + 1;
        const size_t begin = plan.triples.size();
        switch (seg.which) {
            case segment_descriptor::kind::text:
                for (int64_t k = 0; k < seg.length; ++k)
                    plan.triples.push_back({base + k, base + k, base + k});
                break;
            case segment_descriptor::kind::image:
                for (int64_t r = 0; r < seg.grid.grid_h; ++r)
                    for (int64_t c = 0; c < seg.grid.grid_w; ++c)
                        plan.triples.push_back({base, base + r, base + c});
                break;
            case segment_descriptor::kind::video:
                for (int64_t t = 0; t < seg.grid.grid_t; ++t)
                    for (int64_t r = 0; r < seg.grid.grid_h; ++r)
                        for (int64_t c = 0; c < seg.grid.grid_w; ++c)
                            plan.triples.push_back({base + t, base + r, base + c});
                break;
        }
        for (size_t i = begin; i < plan.triples.size(); ++i)
            max_seen = std::max(max_seen, plan.triples[i].max_component());
        plan.segment_spans.emplace_back(begin, plan.triples.size());
    }
    return plan;
}

int64_t max_position(const position_plan& plan) {
    if (plan.triples.empty())
        throw mrope_error(mrope_error::kind::empty_plan, "plan has no tokens");
    int64_t m = plan.triples.front().max_component();
    for (const auto& p : plan.triples) m = std::max(m, p.max_component());
    return m;
}

std::vector<std::pair<int64_t, int64_t>> assign_positions_2d(int64_t patch_rows,
                                                             int64_t patch_cols) {
    if (patch_rows < 1 || patch_cols < 1)
        throw mrope_error(mrope_error::kind::invalid_segment, "grid sides must be >= 1");
    std::vector<std::pair<int64_t, int64_t>> out;
    out.reserve(static_cast<size_t>(patch_rows * patch_cols));
    for (int64_t r = 0; r < patch_rows; ++r)
        for (int64_t c = 0; c < patch_cols; ++c) out.emplace_back(r, c);
    return out;
}

std::vector<std::pair<int64_t, int64_t>> assign_positions_2d(const patch_grid& grid,
                                                             int64_t merge_size) {
    if (merge_size < 1)
        throw mrope_error(mrope_error::kind::invalid_segment, "merge size must be >= 1");
    return assign_positions_2d(grid.grid_h * merge_size, grid.grid_w * merge_size);
}

std::vector<double> rotary_angles(const position_triple& p, const rotary_config& cfg) {
    cfg.validate();
    const int64_t pairs = cfg.head_dim / 2;
    std::vector<double> angles(static_cast<size_t>(pairs));
    for (int64_t k = 0; k < pairs; ++k) {
        const int64_t id = k < cfg.section_t ? p.t : (k < cfg.section_t + cfg.section_h ? p.h : p.w);
        const double freq =
            std::pow(cfg.theta, -2.0 * static_cast<double>(k) / static_cast<double>(cfg.head_dim));
        angles[static_cast<size_t>(k)] = static_cast<double>(id) * freq;
    }
    return angles;
}

std::vector<double> apply_rotary_angles(const std::vector<double>& v,
                                        const std::vector<double>& angles) {
    if (v.size() != angles.size() * 2)
        throw mrope_error(mrope_error::kind::length_mismatch,
                          "vector length must be twice the angle count");
    std::vector<double> out(v.size());
    for (size_t k = 0; k < angles.size(); ++k) {
        const double c = std::cos(angles[k]);
        const double s = std::sin(angles[k]);
        const double x = v[2 * k];
        const double y = v[2 * k + 1];
        out[2 * k] = x * c - y * s;
        out[2 * k + 1] = x * s + y * c;
    }
    return out;
}

std::vector<double> apply_rotary(const std::vector<double>& v, const position_triple& p,
                                 const rotary_config& cfg) {
    if (static_cast<int64_t>(v.size()) != cfg.head_dim)
        throw mrope_error(mrope_error::kind::length_mismatch, "vector length must equal head_dim");
    return apply_rotary_angles(v, rotary_angles(p, cfg));
}

}  // namespace vistok
