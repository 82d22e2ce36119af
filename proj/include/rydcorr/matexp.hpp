#pragma once

#include "rydcorr/operators.hpp"

namespace rydcorr {

// Dense matrix exponential by Pade approximation with scaling and squaring
// (degree chosen from the 1-norm; degree-13 with 2^s scaling above the last
// breakpoint). Accurate to round-off for the generator norms used here.
Operator expm(const Operator& a);

}  // namespace rydcorr
