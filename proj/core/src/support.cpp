#include "dofde/support.hpp"

#include <algorithm>

namespace dofde::expsum {

std::vector<BigReal> support_points(mpfr_prec_t prec) {
  const BigReal ten(10.0, prec);
  const BigReal top = mp::pow(ten, 8L);
  const BigReal twenty_five(25.0, prec);
  std::vector<BigReal> pts;
  pts.reserve(402);
  for (int j = 0; j <= 200; ++j) {
    BigReal p = mp::pow(ten, BigReal(static_cast<double>(j), prec) / twenty_five);
    pts.push_back(p);
    BigReal q = top - p;
    if (!q.is_zero()) pts.push_back(q);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const BigReal& a, const BigReal& b) { return a == b; }),
            pts.end());
  return pts;
}

}  // namespace dofde::expsum
