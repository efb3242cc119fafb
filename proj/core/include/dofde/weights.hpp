#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dofde/bigfloat.hpp"

namespace dofde::kernels {

using mp::BigReal;

// Density phi(alpha) of a distributed-order operator on [0, alpha_max].
// Continuous densities carry an evaluator; discrete ones (Dirac combs) a list
// of orders and coefficients, and eval is empty. Orders must be non-integer.
struct WeightFunction {
  std::string id;
  int alpha_max = 1;
  bool discrete = false;
  double support_lo = 0.0;  // closure of {phi != 0}
  double support_hi = 1.0;
  std::function<BigReal(const BigReal&, mpfr_prec_t)> eval;
  std::vector<double> orders;
  std::vector<double> coeffs;
};

WeightFunction make_exm1();  // exp(-a) Gamma(6-a) on [0, 2]
WeightFunction make_exm2();  // Gamma(4-a) on [0, 2]
// Smooth bump exp(1/((a-c)^2 - r^2)) on |a-c| < r, zero outside, scaled to
// unit mass over [0, alpha_max] (intersection, if the bump sticks out).
WeightFunction make_bump(double center, double radius, int alpha_max);
WeightFunction make_single_order(double alpha);
WeightFunction make_multiterm(const std::vector<double>& orders, const std::vector<double>& coeffs);

// Parse "exm1", "exm2", "bump:<c>:<r>:<amax>", "rl:<alpha>",
// "multiterm:<a1>:<c1>[:<a2>:<c2>...]". Throws std::invalid_argument.
WeightFunction weight_from_id(const std::string& id);

// Decompose into sign-definite parts: (sign, nonnegative weight) pairs.
std::vector<std::pair<int, WeightFunction>> split_sign(const WeightFunction& w);

}  // namespace dofde::kernels
