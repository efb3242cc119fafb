#pragma once

#include <string>
#include <vector>

#include "dofde/barycentric.hpp"
#include "dofde/kernels.hpp"

namespace dofde::expsum {

// One mode of an exponential-sum kernel surrogate: weight * exp(-rate * t).
// Stored as doubles; the time stepper runs in double precision.
struct ExpTerm {
  double weight = 0.0;
  double rate = 0.0;
};

struct CompressedKernel {
  std::string kernel_id;
  int interval = 1;
  double tolerance = 0.0;   // requested relative fit tolerance
  long precision_bits = 0;  // working precision of the fit
  int fixed_terms = 0;      // nonzero when the term count was prescribed
  double l1_error = -1.0;   // certified L1 bound on [1e-5, 1]; negative: not measured
  std::vector<ExpTerm> terms;

  int m() const { return static_cast<int>(terms.size()); }
};

struct CompressOptions {
  double tol = 1e-13;
  int fixed_terms = 0;        // > 0: grow the fit to exactly this many terms
  mpfr_prec_t precision = 0;  // 0: pick 512 bits for tol <= 1e-30, else 256
  bool certify = true;
  int scan_per_decade = 200;  // density of the certification scan
};

// Laplace-domain pipeline: sample s * L[K](s) on the positive-axis grid, fit
// with a rational interpolant, convert poles/residues of fit(s)/s into decay
// modes. Throws ValidationError when the fit is not a positive decaying sum.
CompressedKernel compress(const kernels::DOKernel& k, const CompressOptions& opt = {});

BigReal eval_expsum(const CompressedKernel& ck, const BigReal& t);
double eval_expsum(const CompressedKernel& ck, double t);

// Certified L1 distance between kernel and surrogate on [1e-5, 1]: log-grid
// scan, sign changes bisected, then piecewise adaptive integration.
BigReal l1_error(const kernels::DOKernel& k, const CompressedKernel& ck, mpfr_prec_t prec = 192,
                 int scan_per_decade = 200);

// Inverse transform of r(s)/s for a rational fit r of s * L[K](s): the s = 0
// pole gives a constant mode (dropped when negligible), each finite pole p a
// mode with rate -Re(p) and weight Res(r, p)/p. Poles must be essentially
// real and stable, weights positive.
std::vector<ExpTerm> partial_fractions(const Barycentric<BigReal>& r, const PoleData& poles,
                                       double tol, mpfr_prec_t prec);

}  // namespace dofde::expsum
