#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dofde/condensation.hpp"
#include "dofde/kernel_cache.hpp"
#include "dofde/time_mesh.hpp"
#include "dofde/weights.hpp"

namespace dofde::solve {

// Scalar distributed-order problem
//   integral of phi(a) * (Caputo D^a u)(t) over [0, alpha_max] = f(t, u(t)),
// with initial values u(0), u'(0), ..., u^(alpha_max-1)(0).
struct DofdeProblem {
  kernels::WeightFunction weight;
  std::vector<double> init;                     // size alpha_max
  std::function<double(double, double)> f;      // f(t, u)
  std::function<double(double, double)> df_du;  // may be empty for f linear in t only
  double T = 1.0;
  std::function<double(double)> reference;      // may be empty
};

// How the per-interval kernels are obtained.
struct KernelControls {
  double tol = 1e-40;
  int fixed_terms = 0;        // > 0: prescribe the term count instead of tol
  mpfr_prec_t precision = 0;  // 0: auto
  bool certify = false;       // solver runs don't need the L1 certificate
  int gl_nodes = 0;           // > 0: replace the alpha-integral by an n-point GL rule
  std::string cache_dir;      // empty: no cache
  bool allow_compute = true;  // false: cache miss is a configuration error
};

// One compression per unit interval of the weight support. Kernels that are
// identically zero come back with no terms.
std::vector<expsum::CompressedKernel> problem_kernels(const kernels::WeightFunction& w,
                                                      const KernelControls& kc);

// Flatten compressed kernels into the mode list of the stepper; the kernel of
// interval i drives modes attached to derivative level i.
std::vector<rk::ModeSpec> modes_from_kernels(const std::vector<expsum::CompressedKernel>& cks);

struct SolveControls {
  rk::Scheme scheme = rk::Scheme::radau_iia_2;
  int N = 100;
  double gamma = 1.0;         // mesh grading; 1 = uniform
  rk::NewtonControls newton;  // abs_tol 1e-12
};

struct OdeResult {
  std::vector<double> t;
  std::vector<double> u;
  double linf_error = -1.0;  // max over mesh nodes vs reference; -1 when no reference
  long unknowns = 0;         // s * 1, size of the condensed implicit problem
  int max_newton_iters = 0;
  std::vector<expsum::CompressedKernel> kernels;
};

OdeResult solve_dofde(const DofdeProblem& p, const KernelControls& kc, const SolveControls& sc);

}  // namespace dofde::solve
