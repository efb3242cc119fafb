#pragma once

#include <vector>

#include "dofde/bigfloat.hpp"

namespace dofde::expsum {

using mp::BigComplex;
using mp::BigReal;

// Rational interpolant in barycentric form: nodes z_k, values f_k, weights w_k.
// Evaluation at a node returns the stored value; elsewhere the usual ratio of
// weighted sums.
template <class S>
struct Barycentric {
  std::vector<S> nodes, values, weights;

  std::size_t size() const { return nodes.size(); }

  S eval(const S& x) const {
    const mpfr_prec_t prec = nodes.empty() ? 64 : nodes[0].precision();
    S num = make_zero(prec), den = make_zero(prec);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (equal(x, nodes[k])) return values[k];
      S c = weights[k] / (x - nodes[k]);
      num += c * values[k];
      den += c;
    }
    return num / den;
  }

 private:
  static S make_zero(mpfr_prec_t prec);
  static bool equal(const S& a, const S& b);
};

template <>
inline BigReal Barycentric<BigReal>::make_zero(mpfr_prec_t prec) {
  return BigReal::zero(prec);
}
template <>
inline bool Barycentric<BigReal>::equal(const BigReal& a, const BigReal& b) {
  return a == b;
}
template <>
inline BigComplex Barycentric<BigComplex>::make_zero(mpfr_prec_t prec) {
  return BigComplex(BigReal::zero(prec), BigReal::zero(prec));
}
template <>
inline bool Barycentric<BigComplex>::equal(const BigComplex& a, const BigComplex& b) {
  return a.re == b.re && a.im == b.im;
}

// Real-node interpolant evaluated off the real axis.
BigComplex eval_complex(const Barycentric<BigReal>& r, const BigComplex& x);

struct AaaOptions {
  double tol = 1e-13;       // stop when max residual <= tol * max|f|
  int max_terms = 150;      // support-point cap
  int fixed_terms = 0;      // > 0: grow to exactly this many support points
  int stagnation_window = 5;
  bool cleanup = true;      // one pass dropping negligible-residue poles
};

template <class S>
struct AaaResult {
  Barycentric<S> approximant;
  BigReal max_error;  // max residual over the non-support samples
  int iterations = 0;
};

// Adaptive Antoulas-Anderson fit of samples (x_i, f_i). Greedy support
// selection by worst residual; weights from the smallest right singular
// vector of the Loewner matrix over the remaining samples.
AaaResult<BigReal> aaa(const std::vector<BigReal>& x, const std::vector<BigReal>& f,
                       mpfr_prec_t prec, const AaaOptions& opt = {});
AaaResult<BigComplex> aaa(const std::vector<BigComplex>& x, const std::vector<BigComplex>& f,
                          mpfr_prec_t prec, const AaaOptions& opt = {});

struct PoleData {
  std::vector<BigComplex> poles;
  std::vector<BigComplex> residues;
};

// Poles of a barycentric interpolant: double-precision generalized-eigenvalue
// seeds polished by Newton iteration with deflation of already-found roots.
// Residues via n(p)/d'(p). Output sorted by (Re, Im).
PoleData find_poles(const Barycentric<BigReal>& r, mpfr_prec_t prec);

}  // namespace dofde::expsum
