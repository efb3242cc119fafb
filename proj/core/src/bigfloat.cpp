#include "dofde/bigfloat.hpp"

#include <cstdio>
#include <vector>

#include "dofde/errors.hpp"

namespace dofde::mp {

std::string BigReal::to_string(int digits) const {
  if (digits < 2) digits = 2;
  std::vector<char> buf(static_cast<size_t>(digits) + 32);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, v_);
  return std::string(buf.data());
}

BigReal gamma(const BigReal& x, mpfr_prec_t precision) {
  if (!x.is_finite() || x.sign() <= 0) {
    throw std::domain_error("gamma: argument must be finite and positive, got " +
                            x.to_string(8));
  }
  BigReal r(0.0, precision);
  mpfr_gamma(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

}  // namespace dofde::mp
