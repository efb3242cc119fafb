#pragma once

#include <vector>

#include "dofde/bigfloat.hpp"

namespace dofde::expsum {

using mp::BigReal;

// Sample grid on the positive real axis used to fit Laplace-domain data:
// a log-spaced ladder 10^(j/25), j = 0..200, together with its reflection
// 10^8 - 10^(j/25). The reflected copy clusters points near the top end so
// the fit stays honest there. Zero is dropped; points are ascending, unique.
std::vector<BigReal> support_points(mpfr_prec_t prec);

}  // namespace dofde::expsum
