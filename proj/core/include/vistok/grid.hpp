#pragma once

#include <cstdint>
#include <vector>

namespace vistok {

// Merged-token grid produced by the patchifier. grid_t counts temporal tubes
// (1 for still images), grid_h and grid_w count merged cells. patch_vectors,
// when present, holds tokens() rows of token_dim floats in
// (tube, row, col) row-major token order.
struct patch_grid {
    int64_t grid_t = 1;
    int64_t grid_h = 0;
    int64_t grid_w = 0;
    int64_t token_dim = 0;
    std::vector<float> patch_vectors;

    int64_t tokens() const { return grid_t * grid_h * grid_w; }

    friend bool operator==(const patch_grid&, const patch_grid&) = default;
};

}  // namespace vistok
