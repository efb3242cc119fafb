#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dofde/bigfloat.hpp"

namespace dofde::kernels {

using mp::BigComplex;
using mp::BigReal;

// A quadrature rule on (a, b), nodes ascending, all values at precision `prec`.
// gauss_jacobi integrates g against the weight (b-t)^ja (t-a)^jb; the other
// families integrate g itself.
struct QuadratureRule {
  enum class Family { gauss_legendre, gauss_jacobi, gauss_kronrod };
  Family family = Family::gauss_legendre;
  std::vector<BigReal> nodes;
  std::vector<BigReal> weights;
  // gauss_kronrod only: weights of the embedded n-point Gauss rule, living on
  // the odd-index nodes (1, 3, 5, ...) of the 2n+1 Kronrod nodes.
  std::vector<BigReal> gauss_weights;
  BigReal a, b;
  double jacobi_a = 0.0, jacobi_b = 0.0;
  mpfr_prec_t prec = 64;

  BigReal apply(const std::function<BigReal(const BigReal&)>& f) const;
};

QuadratureRule gauss_nodes(QuadratureRule::Family family, int n, const BigReal& a,
                           const BigReal& b, mpfr_prec_t prec, double jacobi_a = 0.0,
                           double jacobi_b = 0.0);

struct AdaptiveOptions {
  int max_panels = 40000;
  int gauss_n = 7;  // embedded Gauss size; Kronrod uses 2n+1 points
};

struct AdaptiveStats {
  BigReal error_bound;
  int panels = 0;
};

// Global-heap adaptive Gauss-Kronrod to an absolute tolerance. Panels never
// evaluate interval endpoints, so integrable endpoint singularities are fine
// (the heap keeps bisecting toward them). Deterministic for fixed inputs.
// Throws AccuracyError (carrying the achieved bound) if the panel cap is hit.
BigReal integrate_adaptive(const std::function<BigReal(const BigReal&)>& f,
                           const BigReal& a, const BigReal& b, const BigReal& abs_tol,
                           mpfr_prec_t prec, AdaptiveStats* stats = nullptr,
                           const AdaptiveOptions& opt = {});

BigComplex integrate_adaptive(const std::function<BigComplex(const BigReal&)>& f,
                              const BigReal& a, const BigReal& b, const BigReal& abs_tol,
                              mpfr_prec_t prec, AdaptiveStats* stats = nullptr,
                              const AdaptiveOptions& opt = {});

namespace detail {
// Monic three-term recurrence coefficients a_k, b_k (b_0 = total weight mass).
struct Recurrence {
  std::vector<BigReal> a, b;
};
Recurrence legendre_recurrence(int m, mpfr_prec_t prec);
Recurrence jacobi_recurrence(int m, double al, double be, mpfr_prec_t prec);
// Laurie's Jacobi-Kronrod extension: given coefficients through ceil(3n/2),
// returns the (2n+1)-term recurrence whose Gauss rule is the Kronrod rule.
Recurrence kronrod_recurrence(int n, const Recurrence& base);
// Nodes/weights of the Gauss rule for a recurrence, on [-1, 1] reference.
void tridiag_nodes_weights(const Recurrence& rec, int m, mpfr_prec_t prec,
                           std::vector<BigReal>& nodes, std::vector<BigReal>& weights);
}  // namespace detail

}  // namespace dofde::kernels
