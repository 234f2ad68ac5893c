#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vistok/mrope.hpp"

namespace vistok {

// Rotary-embedded score probe: no softmax, no values, double precision
// throughout. Row i of queries/keys belongs to token i of the plan.
struct attention_case {
    std::vector<std::vector<double>> queries;
    std::vector<std::vector<double>> keys;
    position_plan plan;
    rotary_config cfg;
};

struct attention_error : std::runtime_error {
    enum class kind { shape_mismatch, index_out_of_range };
    attention_error(kind k, const std::string& msg) : std::runtime_error(msg), which(k) {}
    kind which;
};

// S[i][j] = <rot(q_i, p_i), rot(k_j, p_j)> / sqrt(head_dim). Swapping the
// query and key sets transposes S exactly; adding a constant to every
// position component leaves S unchanged up to floating-point noise.
std::vector<std::vector<double>> score_matrix(const attention_case& c);

// Analytic gradient of S[i][j] with respect to q_i. The score is linear in
// the query, so this is the key rotated into the query's frame over
// sqrt(head_dim).
std::vector<double> score_gradient_q(const attention_case& c, size_t i, size_t j);

struct extrapolation_report {
    int64_t max_id = 0;
    bool finite = true;
    double max_abs_angle = 0.0;
};

// Scans every rotary angle the plan would produce; used to compare position
// growth of spatial versus sequential ID assignment at long contexts.
extrapolation_report extrapolation_probe(const rotary_config& cfg, const position_plan& plan);

}  // namespace vistok
