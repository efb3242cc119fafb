#include "dofde/barycentric.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <type_traits>

#include "dofde/errors.hpp"
#include "dofde/mplinalg.hpp"

namespace dofde::expsum {

BigComplex eval_complex(const Barycentric<BigReal>& r, const BigComplex& x) {
  const mpfr_prec_t prec = std::max<mpfr_prec_t>(x.precision(),
                                                 r.nodes.empty() ? 64 : r.nodes[0].precision());
  BigComplex num(BigReal::zero(prec), BigReal::zero(prec));
  BigComplex den = num;
  for (std::size_t k = 0; k < r.nodes.size(); ++k) {
    if (x.im.is_zero() && x.re == r.nodes[k])
      return BigComplex(r.values[k], BigReal::zero(prec));
    BigComplex c = BigComplex(r.weights[k], BigReal::zero(prec)) /
                   BigComplex(x.re - r.nodes[k], x.im);
    num += c * r.values[k];
    den += c;
  }
  return num / den;
}

namespace {

template <class S>
AaaResult<S> aaa_impl(const std::vector<S>& xs, const std::vector<S>& fs, mpfr_prec_t prec,
                      const AaaOptions& opt) {
  using TR = mp::ScalarTraits<S>;
  const std::size_t N = xs.size();
  if (N != fs.size() || N < 3) throw std::invalid_argument("aaa: need at least 3 samples");
  if (opt.fixed_terms < 0 || opt.max_terms < 1) throw std::invalid_argument("aaa: bad options");

  BigReal fmax = BigReal::zero(prec);
  for (const S& f : fs) fmax = mp::max(fmax, TR::abs_val(f));
  if (fmax.is_zero()) throw std::invalid_argument("aaa: all samples vanish");
  const BigReal tol_abs = BigReal(opt.tol, prec) * fmax;

  // a residual that came out NaN (division by a vanishing barycentric
  // denominator) counts as infinitely bad, so the point gets picked next
  auto sanitize = [prec](BigReal ri) {
    if (!ri.is_finite()) mpfr_set_inf(ri.raw(), 1);
    return ri;
  };

  std::vector<char> is_sup(N, 0);
  std::vector<std::size_t> sup;
  std::vector<S> w;
  std::vector<S> R(N, TR::make(0.0, prec));
  {
    S mean = TR::make(0.0, prec);
    for (const S& f : fs) mean += f;
    mean = mean * TR::make(1.0 / static_cast<double>(N), prec);
    for (std::size_t i = 0; i < N; ++i) R[i] = mean;
  }

  // solve for weights given the current support set; returns max residual
  auto solve_weights = [&]() -> BigReal {
    const std::size_t m = sup.size();
    std::vector<std::size_t> rows;
    rows.reserve(N - m);
    for (std::size_t i = 0; i < N; ++i)
      if (!is_sup[i]) rows.push_back(i);
    mp::Matrix<S> A(rows.size(), m, TR::make(0.0, prec));
    for (std::size_t c = 0; c < m; ++c) {
      const S& zc = xs[sup[c]];
      const S& fc = fs[sup[c]];
      for (std::size_t ri = 0; ri < rows.size(); ++ri) {
        const std::size_t i = rows[ri];
        A(ri, c) = (fs[i] - fc) / (xs[i] - zc);
      }
    }
    auto svd = mp::jacobi_svd(A);
    w.resize(m);
    for (std::size_t c = 0; c < m; ++c) w[c] = svd.V(c, m - 1);
    BigReal err = BigReal::zero(prec);
    for (std::size_t i : rows) {
      S num = TR::make(0.0, prec), den = TR::make(0.0, prec);
      for (std::size_t c = 0; c < m; ++c) {
        S t = w[c] / (xs[i] - xs[sup[c]]);
        num += t * fs[sup[c]];
        den += t;
      }
      R[i] = num / den;
      err = mp::max(err, sanitize(TR::abs_val(fs[i] - R[i])));
    }
    return err;
  };

  struct Snapshot {
    std::vector<std::size_t> sup;
    std::vector<S> w;
    BigReal err;
  };
  Snapshot best;
  int no_improve = 0;
  BigReal err = fmax;
  int iter = 0;
  bool stopped_on_tol = false;

  while (true) {
    std::size_t jbest = N;
    BigReal rbest = BigReal::zero(prec);
    for (std::size_t i = 0; i < N; ++i) {
      if (is_sup[i]) continue;
      BigReal ri = sanitize(TR::abs_val(fs[i] - R[i]));
      if (jbest == N || ri > rbest) {
        rbest = ri;
        jbest = i;
      }
    }
    if (jbest == N) break;
    if (N - sup.size() - 1 < sup.size() + 1) break;  // Loewner would go wide
    is_sup[jbest] = 1;
    sup.push_back(jbest);
    ++iter;

    err = solve_weights();
    if (std::getenv("DOFDE_AAA_TRACE"))
      std::fprintf(stderr, "aaa m=%zu err=%s\n", sup.size(), err.to_string(3).c_str());

    if (best.sup.empty() || err < best.err) {
      best = Snapshot{sup, w, err};
      no_improve = 0;
    } else {
      ++no_improve;
    }

    if (opt.fixed_terms > 0) {
      if (static_cast<int>(sup.size()) >= opt.fixed_terms) break;
      continue;
    }
    if (err <= tol_abs) {
      stopped_on_tol = true;
      break;
    }
    if (static_cast<int>(sup.size()) >= opt.max_terms) break;
    if (no_improve >= opt.stagnation_window) break;
  }

  if (sup.empty()) throw NumericalError("aaa: no support points selected");

  // on stagnation or cap, fall back to the best state seen
  if (!stopped_on_tol && opt.fixed_terms == 0 && !best.sup.empty() && best.err < err) {
    std::fill(is_sup.begin(), is_sup.end(), 0);
    sup = best.sup;
    for (std::size_t i : sup) is_sup[i] = 1;
    w = best.w;
    err = best.err;
  }

  auto make_result = [&]() {
    AaaResult<S> res;
    res.approximant.nodes.reserve(sup.size());
    res.approximant.values.reserve(sup.size());
    for (std::size_t i : sup) {
      res.approximant.nodes.push_back(xs[i]);
      res.approximant.values.push_back(fs[i]);
    }
    res.approximant.weights = w;
    res.max_error = err;
    res.iterations = iter;
    return res;
  };

  if constexpr (std::is_same_v<S, BigReal>) {
    if (opt.cleanup && opt.fixed_terms == 0 && sup.size() >= 2) {
      AaaResult<S> cur = make_result();
      PoleData pd = find_poles(cur.approximant, prec);
      const BigReal droptol = BigReal(0.01, prec) * tol_abs;
      std::set<std::size_t> doomed;
      for (std::size_t p = 0; p < pd.poles.size(); ++p) {
        if (mp::abs(pd.residues[p]) >= droptol) continue;
        std::size_t nearest = 0;
        BigReal dist;
        for (std::size_t c = 0; c < sup.size(); ++c) {
          BigReal d = mp::abs(BigComplex(xs[sup[c]] - pd.poles[p].re, -pd.poles[p].im));
          if (c == 0 || d < dist) {
            dist = d;
            nearest = c;
          }
        }
        doomed.insert(nearest);
      }
      if (!doomed.empty() && sup.size() - doomed.size() >= 1) {
        std::vector<std::size_t> kept;
        for (std::size_t c = 0; c < sup.size(); ++c)
          if (!doomed.count(c)) kept.push_back(sup[c]);
        for (std::size_t c : doomed) is_sup[sup[c]] = 0;
        sup = kept;
        err = solve_weights();
      }
    }
  }

  return make_result();
}

}  // namespace

AaaResult<BigReal> aaa(const std::vector<BigReal>& x, const std::vector<BigReal>& f,
                       mpfr_prec_t prec, const AaaOptions& opt) {
  return aaa_impl<BigReal>(x, f, prec, opt);
}

AaaResult<BigComplex> aaa(const std::vector<BigComplex>& x, const std::vector<BigComplex>& f,
                          mpfr_prec_t prec, const AaaOptions& opt) {
  return aaa_impl<BigComplex>(x, f, prec, opt);
}

PoleData find_poles(const Barycentric<BigReal>& r, mpfr_prec_t prec) {
  PoleData out;
  const std::size_t m = r.size();
  if (m < 2) return out;
  const std::size_t want = m - 1;

  const BigReal one(1.0, prec);
  BigReal thr = one;
  for (long b = 0; b < static_cast<long>(prec) - 16; ++b) thr = thr * BigReal(0.5, prec);
  // fallback level for iterations that stall at their rounding floor
  BigReal weak = one;
  for (long b = 0; b < static_cast<long>(prec) / 2; ++b) weak = weak * BigReal(0.5, prec);

  auto d_real = [&](const BigReal& s) {
    BigReal d = BigReal::zero(prec);
    for (std::size_t k = 0; k < m; ++k) d += r.weights[k] / (s - r.nodes[k]);
    return d;
  };

  // Newton iteration on d(s) = sum w_k / (s - z_k) with deflation of the
  // roots already found; empty on non-convergence
  auto polish = [&](BigComplex s) -> std::optional<BigComplex> {
    BigReal prev_step = BigReal(-1.0, prec);
    for (int it = 0; it < 200; ++it) {
      BigComplex d(BigReal::zero(prec), BigReal::zero(prec));
      BigComplex dp = d;
      for (std::size_t k = 0; k < m; ++k) {
        BigComplex q = BigComplex(s.re - r.nodes[k], s.im);
        BigComplex c = BigComplex(r.weights[k], BigReal::zero(prec)) / q;
        d += c;
        dp -= c / q;
      }
      if (!d.is_finite() || !dp.is_finite()) return std::nullopt;
      if (d.re.is_zero() && d.im.is_zero()) return s;  // exact root
      BigComplex g = dp / d;
      for (const BigComplex& p : out.poles) {
        BigComplex diff = s - p;
        g -= BigComplex(one, BigReal::zero(prec)) / diff;
      }
      BigComplex step = BigComplex(one, BigReal::zero(prec)) / g;
      s -= step;
      if (!s.is_finite()) return std::nullopt;
      BigReal sa = mp::abs(step);
      BigReal scale = one + mp::abs(s);
      if (sa <= thr * scale) return s;
      if (prev_step.sign() >= 0 && !(sa < prev_step) && sa <= weak * scale)
        return s;  // progress stopped at the rounding floor of d(s)
      prev_step = sa;
    }
    return std::nullopt;
  };

  auto known = [&](const BigComplex& s) {
    for (const BigComplex& p : out.poles)
      if (mp::abs(s - p) <= BigReal(1e-8, prec) * (one + mp::abs(p))) return true;
    return false;
  };

  // Valid kernel fits have simple real poles left of the origin: locate them
  // as sign changes of d on a log grid of the negative axis, refine by
  // bisection, then polish. Runs entirely in real arithmetic.
  {
    const int per_decade = 40, decades_hi = 16, decades_lo = 18;
    const int n = per_decade * (decades_hi + decades_lo);
    BigReal prev_s = BigReal::zero(prec);
    int prev_sign = 0;
    for (int j = 0; j <= n && out.poles.size() < want; ++j) {
      BigReal mag = mp::pow(BigReal(10.0, prec),
                            BigReal(static_cast<double>(decades_hi), prec) -
                                BigReal(static_cast<double>(j), prec) /
                                    BigReal(static_cast<double>(per_decade), prec));
      BigReal sj = -mag;
      BigReal dj = d_real(sj);
      int sign = dj.sign();
      if (sign == 0) {
        out.poles.push_back(BigComplex(sj, BigReal::zero(prec)));
      } else if (prev_sign != 0 && sign * prev_sign < 0) {
        BigReal lo = prev_s, hi = sj;  // lo < hi, opposite signs
        int slo = prev_sign;
        for (int it = 0; it < 30; ++it) {
          BigReal mid = (lo + hi) * BigReal(0.5, prec);
          int sm = d_real(mid).sign();
          if (sm == 0) {
            lo = hi = mid;
            break;
          }
          if (sm == slo)
            lo = mid;
          else
            hi = mid;
        }
        BigComplex cand((lo + hi) * BigReal(0.5, prec), BigReal::zero(prec));
        if (auto p = polish(cand); p && !known(*p)) out.poles.push_back(*p);
      }
      prev_s = sj;
      prev_sign = sign;
    }
  }

  // Remaining roots (complex pairs of degenerate fits, or real roots the scan
  // missed): seed from the generalized eigenvalues of the arrowhead pencil in
  // double precision; Maehly deflation steers duplicates away on its own.
  if (out.poles.size() < want) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 1, m + 1);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m + 1, m + 1);
    for (std::size_t k = 0; k < m; ++k) {
      A(0, k + 1) = r.weights[k].to_double();
      A(k + 1, 0) = 1.0;
      A(k + 1, k + 1) = r.nodes[k].to_double();
      B(k + 1, k + 1) = 1.0;
    }
    Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges;
    ges.compute(A, B, false);
    std::vector<std::size_t> order(m + 1);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(ges.betas()(a)) > std::abs(ges.betas()(b));
    });
    std::vector<std::complex<double>> seeds;
    for (std::size_t k = 0; k + 2 <= m + 1 && seeds.size() < want; ++k) {
      double beta = ges.betas()(order[k]);
      if (beta == 0.0) break;
      seeds.push_back(ges.alphas()(order[k]) / beta);
    }
    std::sort(seeds.begin(), seeds.end(), [](std::complex<double> a, std::complex<double> b) {
      if (a.real() != b.real()) return a.real() < b.real();
      return a.imag() < b.imag();
    });
    for (const auto& seed : seeds) {
      if (out.poles.size() >= want) break;
      if (auto p = polish(BigComplex(seed.real(), seed.imag(), prec)); p && !known(*p))
        out.poles.push_back(*p);
    }
  }

  if (out.poles.size() != want)
    throw NumericalError("find_poles: located " + std::to_string(out.poles.size()) + " of " +
                         std::to_string(want) + " poles");

  std::sort(out.poles.begin(), out.poles.end(), [](const BigComplex& a, const BigComplex& b) {
    if (!(a.re == b.re)) return a.re < b.re;
    return a.im < b.im;
  });

  for (const BigComplex& p : out.poles) {
    BigComplex num(BigReal::zero(prec), BigReal::zero(prec));
    BigComplex dp = num;
    for (std::size_t k = 0; k < m; ++k) {
      BigComplex q = BigComplex(p.re - r.nodes[k], p.im);
      BigComplex c = BigComplex(r.weights[k], BigReal::zero(prec)) / q;
      num += c * r.values[k];
      dp -= c / q;
    }
    out.residues.push_back(num / dp);
  }
  return out;
}

}  // namespace dofde::expsum
