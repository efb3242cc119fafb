#pragma once

#include <mpfr.h>

#include <cstdint>
#include <string>
#include <utility>

namespace dofde::mp {

// Arbitrary-precision real backed by MPFR. Each value carries its own mantissa
// precision in bits; binary operators round to the wider operand precision
// (round to nearest), so one arithmetic operation at precision p contributes a
// relative error of at most 2^(1-p).
class BigReal {
 public:
  BigReal() { mpfr_init2(v_, 64); mpfr_set_zero(v_, 1); }
  explicit BigReal(double x, mpfr_prec_t prec = 64) {
    mpfr_init2(v_, prec);
    mpfr_set_d(v_, x, MPFR_RNDN);
  }
  explicit BigReal(long x, mpfr_prec_t prec = 64) {
    mpfr_init2(v_, prec);
    mpfr_set_si(v_, x, MPFR_RNDN);
  }
  BigReal(const std::string& dec, mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    mpfr_set_str(v_, dec.c_str(), 10, MPFR_RNDN);
  }
  BigReal(const BigReal& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  BigReal(BigReal&& o) noexcept {
    mpfr_init2(v_, 2);  // leave o in a destructible state
    mpfr_swap(v_, o.v_);
  }
  BigReal& operator=(const BigReal& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigReal& operator=(BigReal&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigReal() { mpfr_clear(v_); }

  static BigReal zero(mpfr_prec_t prec) { return BigReal(0.0, prec); }
  static BigReal pi(mpfr_prec_t prec) {
    BigReal r(0.0, prec);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }

  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
  // Rounds the value to a new precision.
  BigReal round_to(mpfr_prec_t prec) const {
    BigReal r(0.0, prec);
    mpfr_set(r.v_, v_, MPFR_RNDN);
    return r;
  }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }
  std::string to_string(int digits = 20) const;

  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  bool is_nan() const { return mpfr_nan_p(v_) != 0; }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  // Raw handles for fused loops (mpfr_fma etc.).
  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  friend void swap(BigReal& a, BigReal& b) noexcept { mpfr_swap(a.v_, b.v_); }

#define DOFDE_BIGREAL_BINOP(op, fn)                                  \
  friend BigReal operator op(const BigReal& a, const BigReal& b) {   \
    BigReal r(0.0, std::max(a.precision(), b.precision()));          \
    fn(r.v_, a.v_, b.v_, MPFR_RNDN);                                 \
    return r;                                                        \
  }                                                                  \
  BigReal& operator op##=(const BigReal & b) {                       \
    if (precision() < b.precision()) *this = round_to(b.precision());\
    fn(v_, v_, b.v_, MPFR_RNDN);                                     \
    return *this;                                                    \
  }
  DOFDE_BIGREAL_BINOP(+, mpfr_add)
  DOFDE_BIGREAL_BINOP(-, mpfr_sub)
  DOFDE_BIGREAL_BINOP(*, mpfr_mul)
  DOFDE_BIGREAL_BINOP(/, mpfr_div)
#undef DOFDE_BIGREAL_BINOP

  friend BigReal operator-(const BigReal& a) {
    BigReal r(0.0, a.precision());
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend BigReal operator*(const BigReal& a, long b) {
    BigReal r(0.0, a.precision());
    mpfr_mul_si(r.v_, a.v_, b, MPFR_RNDN);
    return r;
  }
  friend BigReal operator/(const BigReal& a, long b) {
    BigReal r(0.0, a.precision());
    mpfr_div_si(r.v_, a.v_, b, MPFR_RNDN);
    return r;
  }

  friend bool operator<(const BigReal& a, const BigReal& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
  friend bool operator>(const BigReal& a, const BigReal& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
  friend bool operator<=(const BigReal& a, const BigReal& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
  friend bool operator>=(const BigReal& a, const BigReal& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
  friend bool operator==(const BigReal& a, const BigReal& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend bool operator!=(const BigReal& a, const BigReal& b) { return !(a == b); }

  // this += x*y, fused (one rounding).
  void add_mul(const BigReal& x, const BigReal& y) { mpfr_fma(v_, x.v_, y.v_, v_, MPFR_RNDN); }
  // this -= x*y, fused.
  void sub_mul(const BigReal& x, const BigReal& y) { mpfr_fms(v_, x.v_, y.v_, v_, MPFR_RNDN); mpfr_neg(v_, v_, MPFR_RNDN); }

 private:
  mpfr_t v_;
};

inline BigReal abs(const BigReal& a) {
  BigReal r(0.0, a.precision());
  mpfr_abs(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

#define DOFDE_BIGREAL_UNARY(name, fn)          \
  inline BigReal name(const BigReal& a) {      \
    BigReal r(0.0, a.precision());             \
    fn(r.raw(), a.raw(), MPFR_RNDN);           \
    return r;                                  \
  }
DOFDE_BIGREAL_UNARY(sqrt, mpfr_sqrt)
DOFDE_BIGREAL_UNARY(exp, mpfr_exp)
DOFDE_BIGREAL_UNARY(log, mpfr_log)
DOFDE_BIGREAL_UNARY(log10, mpfr_log10)
DOFDE_BIGREAL_UNARY(sin, mpfr_sin)
DOFDE_BIGREAL_UNARY(cos, mpfr_cos)
#undef DOFDE_BIGREAL_UNARY

inline BigReal floor(const BigReal& a) {
  BigReal r(0.0, a.precision());
  mpfr_rint_floor(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}
inline BigReal ceil(const BigReal& a) {
  BigReal r(0.0, a.precision());
  mpfr_rint_ceil(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

inline BigReal pow(const BigReal& b, const BigReal& e) {
  BigReal r(0.0, std::max(b.precision(), e.precision()));
  mpfr_pow(r.raw(), b.raw(), e.raw(), MPFR_RNDN);
  return r;
}
inline BigReal pow(const BigReal& b, long e) {
  BigReal r(0.0, b.precision());
  mpfr_pow_si(r.raw(), b.raw(), e, MPFR_RNDN);
  return r;
}
inline BigReal atan2(const BigReal& y, const BigReal& x) {
  BigReal r(0.0, std::max(y.precision(), x.precision()));
  mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
  return r;
}
inline BigReal hypot(const BigReal& x, const BigReal& y) {
  BigReal r(0.0, std::max(y.precision(), x.precision()));
  mpfr_hypot(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
  return r;
}
inline const BigReal& max(const BigReal& a, const BigReal& b) { return a < b ? b : a; }
inline const BigReal& min(const BigReal& a, const BigReal& b) { return a < b ? a : b; }

// Gamma function at the requested precision. Defined for x > 0 only; the
// pipeline never needs other arguments, and rejecting them loudly beats
// returning a reflected value nobody asked for.
BigReal gamma(const BigReal& x, mpfr_prec_t precision);
inline BigReal gamma(const BigReal& x) { return gamma(x, x.precision()); }

// Complex value over two BigReals. Only the operations the pipeline needs.
class BigComplex {
 public:
  BigReal re, im;

  BigComplex() = default;
  BigComplex(BigReal r, BigReal i) : re(std::move(r)), im(std::move(i)) {}
  explicit BigComplex(const BigReal& r) : re(r), im(BigReal(0.0, r.precision())) {}
  BigComplex(double r, double i, mpfr_prec_t prec) : re(r, prec), im(i, prec) {}

  mpfr_prec_t precision() const { return std::max(re.precision(), im.precision()); }
  bool is_finite() const { return re.is_finite() && im.is_finite(); }

  friend BigComplex operator+(const BigComplex& a, const BigComplex& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend BigComplex operator-(const BigComplex& a, const BigComplex& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend BigComplex operator-(const BigComplex& a) { return {-a.re, -a.im}; }
  friend BigComplex operator*(const BigComplex& a, const BigComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend BigComplex operator*(const BigReal& a, const BigComplex& b) {
    return {a * b.re, a * b.im};
  }
  friend BigComplex operator*(const BigComplex& a, const BigReal& b) {
    return {a.re * b, a.im * b};
  }
  friend BigComplex operator/(const BigComplex& a, const BigReal& b) {
    return {a.re / b, a.im / b};
  }
  friend BigComplex operator/(const BigComplex& a, const BigComplex& b) {
    BigReal d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  BigComplex& operator+=(const BigComplex& b) {
    re += b.re;
    im += b.im;
    return *this;
  }
  BigComplex& operator-=(const BigComplex& b) {
    re -= b.re;
    im -= b.im;
    return *this;
  }
};

inline BigComplex conj(const BigComplex& z) { return {z.re, -z.im}; }
inline BigReal abs2(const BigComplex& z) { return z.re * z.re + z.im * z.im; }
inline BigReal abs(const BigComplex& z) { return hypot(z.re, z.im); }
inline BigComplex log(const BigComplex& z) {
  return {log(abs(z)), atan2(z.im, z.re)};
}
inline BigComplex exp(const BigComplex& z) {
  BigReal m = exp(z.re);
  return {m * cos(z.im), m * sin(z.im)};
}
// Principal branch z^e for real exponent.
inline BigComplex pow(const BigComplex& z, const BigReal& e) {
  BigComplex l = log(z);
  return exp(BigComplex{e * l.re, e * l.im});
}

}  // namespace dofde::mp
