#pragma once

#include <optional>
#include <string>

#include "dofde/quadrature.hpp"
#include "dofde/weights.hpp"

namespace dofde::kernels {

// Memory kernel of one unit interval (index-1, index] of a distributed-order
// operator:
//   K_i(t) = integral over alpha of phi(alpha) t^(i-1-alpha) / Gamma(i-alpha),
// restricted to alpha in (i-1, i]. Discrete weights and rule-discretized
// continuous weights turn the integral into a finite sum.
struct DOKernel {
  WeightFunction weight;
  int index = 1;
  // When set, the alpha-integral is replaced by this fixed rule (nodes must
  // lie inside the interval). Only meaningful for continuous weights.
  std::optional<QuadratureRule> rule;
  // Absolute tolerance for the adaptive alpha-integration in continuous mode.
  double quad_abs_tol = 1e-30;
  mpfr_prec_t prec = 256;
};

DOKernel make_kernel(const WeightFunction& w, int index, mpfr_prec_t prec = 256);
// Continuous weight sampled with an n-point Gauss-Legendre rule on the
// intersection of the weight support with (index-1, index).
DOKernel discretize_kernel(const WeightFunction& w, int index, int n_nodes,
                           mpfr_prec_t prec = 256);

bool kernel_is_discrete(const DOKernel& k);
// True when the kernel vanishes identically (weight has no mass on the
// kernel's unit interval).
bool kernel_is_zero(const DOKernel& k);
std::string kernel_id(const DOKernel& k);

BigReal eval_kernel(const DOKernel& k, const BigReal& t);
BigReal eval_laplace(const DOKernel& k, const BigReal& s);
BigComplex eval_laplace(const DOKernel& k, const BigComplex& s);

}  // namespace dofde::kernels
