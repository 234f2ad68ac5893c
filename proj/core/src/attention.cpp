#include "vistok/attention.hpp"

#include <cmath>

namespace vistok {

namespace {

void check_case(const attention_case& c) {
    c.cfg.validate();
    const size_t n = c.plan.triples.size();
    if (c.queries.size() != n || c.keys.size() != n)
        throw attention_error(attention_error::kind::shape_mismatch,
                              "queries/keys row count must match the plan token count");
    for (const auto& row : c.queries)
        if (static_cast<int64_t>(row.size()) != c.cfg.head_dim)
            throw attention_error(attention_error::kind::shape_mismatch,
                                  "query row length must equal head_dim");
    for (const auto& row : c.keys)
        if (static_cast<int64_t>(row.size()) != c.cfg.head_dim)
            throw attention_error(attention_error::kind::shape_mismatch,
                                  "key row length must equal head_dim");
}

}  // namespace

std::vector<std::vector<double>> score_matrix(const attention_case& c) {
    check_case(c);
    const size_t n = c.plan.triples.size();
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(c.cfg.head_dim));

    std::vector<std::vector<double>> rq(n), rk(n);
    for (size_t i = 0; i < n; ++i) {
        const auto angles = rotary_angles(c.plan.triples[i], c.cfg);
        rq[i] = apply_rotary_angles(c.queries[i], angles);
        rk[i] = apply_rotary_angles(c.keys[i], angles);
    }

    std::vector<std::vector<double>> s(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (size_t d = 0; d < rq[i].size(); ++d) acc += rq[i][d] * rk[j][d];
            s[i][j] = acc * inv_sqrt_d;
        }
    return s;
}

std::vector<double> score_gradient_q(const attention_case& c, size_t i, size_t j) {
    check_case(c);
    if (i >= c.plan.triples.size() || j >= c.plan.triples.size())
        throw attention_error(attention_error::kind::index_out_of_range, "token index out of range");

    // rot is orthogonal, so d<rot(q,pi), rot(k,pj)>/dq = rot^-1(rot(k,pj), pi).
    auto rk = apply_rotary(c.keys[j], c.plan.triples[j], c.cfg);
    auto angles = rotary_angles(c.plan.triples[i], c.cfg);
    for (auto& a : angles) a = -a;
    auto grad = apply_rotary_angles(rk, angles);
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(c.cfg.head_dim));
    for (auto& g : grad) g *= inv_sqrt_d;
    return grad;
}

extrapolation_report extrapolation_probe(const rotary_config& cfg, const position_plan& plan) {
    cfg.validate();
    extrapolation_report rep;
    rep.max_id = max_position(plan);
    for (const auto& p : plan.triples) {
        for (const double a : rotary_angles(p, cfg)) {
            if (!std::isfinite(a)) rep.finite = false;
            rep.max_abs_angle = std::max(rep.max_abs_angle, std::abs(a));
        }
    }
    return rep;
}

}  // namespace vistok
