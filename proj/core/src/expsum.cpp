#include "dofde/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "dofde/errors.hpp"
#include "dofde/quadrature.hpp"
#include "dofde/support.hpp"

namespace dofde::expsum {

using kernels::DOKernel;

std::vector<ExpTerm> partial_fractions(const Barycentric<BigReal>& r, const PoleData& pd,
                                       double tol, mpfr_prec_t prec) {
  const BigReal one(1.0, prec);
  BigReal fscale = BigReal::zero(prec);
  for (const BigReal& v : r.values) fscale = mp::max(fscale, mp::abs(v));
  const BigReal negligible = BigReal(0.01 * tol, prec) * fscale;

  std::vector<ExpTerm> terms;
  BigReal zero_weight = r.eval(BigReal::zero(prec));

  for (std::size_t j = 0; j < pd.poles.size(); ++j) {
    const BigComplex& p = pd.poles[j];
    BigReal scale = one + mp::abs(p);
    if (mp::abs(p.im) > BigReal(1e-30, prec) * scale)
      throw ValidationError("partial_fractions: pole " + p.re.to_string(6) + " + " +
                            p.im.to_string(6) + "i is not real");
    BigReal lambda = -p.re;
    if (lambda < -BigReal(1e-30, prec) * scale)
      throw ValidationError("partial_fractions: unstable pole at " + p.re.to_string(6));
    BigComplex wq = pd.residues[j] / p;
    BigReal w = wq.re;
    if (lambda.sign() <= 0) {
      // clamp a zero-grazing rate into the constant mode
      zero_weight += w;
      continue;
    }
    if (!(w > BigReal::zero(prec)))
      throw ValidationError("partial_fractions: nonpositive mode weight " + w.to_string(6) +
                            " at rate " + lambda.to_string(6));
    ExpTerm t;
    t.weight = w.to_double();
    t.rate = lambda.to_double();
    if (!std::isfinite(t.weight) || !std::isfinite(t.rate))
      throw NumericalError("partial_fractions: mode does not fit in double range");
    terms.push_back(t);
  }

  if (mp::abs(zero_weight) > negligible) {
    if (!(zero_weight > BigReal::zero(prec)))
      throw ValidationError("partial_fractions: negative constant mode " +
                            zero_weight.to_string(6));
    terms.push_back(ExpTerm{zero_weight.to_double(), 0.0});
  }

  std::sort(terms.begin(), terms.end(),
            [](const ExpTerm& a, const ExpTerm& b) { return a.rate < b.rate; });
  return terms;
}

BigReal eval_expsum(const CompressedKernel& ck, const BigReal& t) {
  const mpfr_prec_t prec = t.precision();
  BigReal acc = BigReal::zero(prec);
  for (const ExpTerm& term : ck.terms)
    acc += BigReal(term.weight, prec) * mp::exp(BigReal(-term.rate, prec) * t);
  return acc;
}

double eval_expsum(const CompressedKernel& ck, double t) {
  double acc = 0.0;
  for (const ExpTerm& term : ck.terms) acc += term.weight * std::exp(-term.rate * t);
  return acc;
}

BigReal l1_error(const DOKernel& k, const CompressedKernel& ck, mpfr_prec_t prec,
                 int scan_per_decade) {
  DOKernel kk = k;
  kk.prec = prec;
  kk.quad_abs_tol = std::min(kk.quad_abs_tol, 1e-25);
  auto diff = [&](const BigReal& t) { return eval_kernel(kk, t) - eval_expsum(ck, t); };

  // scan 10^-5 .. 10^0 on a log grid
  const int decades = 5;
  const int n = decades * scan_per_decade;
  std::vector<BigReal> grid;
  grid.reserve(n + 1);
  const BigReal ten(10.0, prec);
  const BigReal step = BigReal(1.0, prec) / BigReal(static_cast<double>(scan_per_decade), prec);
  for (int j = 0; j <= n; ++j)
    grid.push_back(mp::pow(ten, BigReal(static_cast<double>(j - n), prec) * step));

  std::vector<BigReal> d(n + 1, BigReal::zero(prec));
  for (int j = 0; j <= n; ++j) d[j] = diff(grid[j]);

  // cut points: every sign change, located by bisection
  std::vector<BigReal> cuts;
  cuts.push_back(grid[0]);
  for (int j = 0; j < n; ++j) {
    if (d[j].sign() == 0) continue;
    if (d[j].sign() * d[j + 1].sign() >= 0) continue;
    BigReal lo = grid[j], hi = grid[j + 1];
    int slo = d[j].sign();
    for (int it = 0; it < 48; ++it) {
      BigReal mid = (lo + hi) * BigReal(0.5, prec);
      int sm = diff(mid).sign();
      if (sm == 0) {
        lo = hi = mid;
        break;
      }
      if (sm == slo)
        lo = mid;
      else
        hi = mid;
    }
    cuts.push_back((lo + hi) * BigReal(0.5, prec));
  }
  cuts.push_back(grid[n]);

  BigReal total = BigReal::zero(prec);
  const BigReal piece_tol(1e-21, prec);
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    if (!(cuts[c + 1] > cuts[c])) continue;
    BigReal piece = kernels::integrate_adaptive(std::function<BigReal(const BigReal&)>(diff),
                                                cuts[c], cuts[c + 1], piece_tol, prec);
    total += mp::abs(piece);
  }
  return total;
}

CompressedKernel compress(const DOKernel& k, const CompressOptions& opt) {
  CompressedKernel ck;
  ck.kernel_id = kernels::kernel_id(k);
  ck.interval = k.index;
  ck.tolerance = opt.tol;
  ck.fixed_terms = opt.fixed_terms;

  const mpfr_prec_t prec =
      opt.precision > 0 ? opt.precision : (opt.tol <= 1e-30 ? mpfr_prec_t(512) : mpfr_prec_t(256));
  ck.precision_bits = static_cast<long>(prec);

  if (kernels::kernel_is_zero(k)) {
    ck.l1_error = 0.0;
    return ck;
  }

  DOKernel kk = k;
  kk.prec = prec;
  kk.quad_abs_tol = opt.tol * 1e-10;

  std::vector<BigReal> xs = support_points(prec);
  std::vector<BigReal> fs;
  fs.reserve(xs.size());
  for (const BigReal& s : xs) fs.push_back(s * eval_laplace(kk, s));

  AaaOptions ao;
  ao.tol = opt.tol;
  ao.fixed_terms = opt.fixed_terms;
  ao.cleanup = opt.fixed_terms == 0;
  AaaResult<BigReal> fit = aaa(xs, fs, prec, ao);

  PoleData pd = find_poles(fit.approximant, prec);
  ck.terms = partial_fractions(fit.approximant, pd, opt.tol, prec);

  if (opt.certify) {
    ck.l1_error = l1_error(k, ck, std::min<mpfr_prec_t>(prec, 192), opt.scan_per_decade)
                      .to_double();
  }
  return ck;
}

}  // namespace dofde::expsum
