#include "dofde/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "dofde/errors.hpp"

namespace dofde::kernels {

namespace {

BigReal ldexp2(const BigReal& x, long e) {
  BigReal r = BigReal::zero(x.precision());
  mpfr_mul_2si(r.raw(), x.raw(), e, MPFR_RNDN);
  return r;
}

BigReal from_long(long v, mpfr_prec_t prec) {
  return BigReal(v, prec);
}

}  // namespace

namespace detail {

Recurrence legendre_recurrence(int m, mpfr_prec_t prec) {
  Recurrence rec;
  rec.a.assign(m, BigReal::zero(prec));
  rec.b.assign(m, BigReal::zero(prec));
  rec.b[0] = from_long(2, prec);
  for (int k = 1; k < m; ++k) {
    // b_k = k^2 / (4k^2 - 1)
    BigReal k2 = from_long(static_cast<long>(k) * k, prec);
    rec.b[k] = k2 / (from_long(4, prec) * k2 - from_long(1, prec));
  }
  return rec;
}

Recurrence jacobi_recurrence(int m, double al, double be, mpfr_prec_t prec) {
  if (al <= -1.0 || be <= -1.0) throw std::domain_error("jacobi_recurrence: exponents must be > -1");
  Recurrence rec;
  rec.a.assign(m, BigReal::zero(prec));
  rec.b.assign(m, BigReal::zero(prec));
  BigReal A(al, prec), B(be, prec);
  BigReal ab = A + B;
  BigReal one = from_long(1, prec), two = from_long(2, prec), four = from_long(4, prec);
  // mass: 2^(a+b+1) Gamma(a+1) Gamma(b+1) / Gamma(a+b+2)
  rec.b[0] = mp::pow(two, ab + one) * mp::gamma(A + one, prec) * mp::gamma(B + one, prec) /
             mp::gamma(ab + two, prec);
  if (m > 0) rec.a[0] = (B - A) / (ab + two);
  for (int k = 1; k < m; ++k) {
    BigReal K = from_long(k, prec);
    BigReal d = two * K + ab;
    rec.a[k] = (B * B - A * A) / (d * (d + two));
    if (k == 1) {
      rec.b[1] = four * (A + one) * (B + one) / ((ab + two) * (ab + two) * (ab + two + one));
    } else {
      rec.b[k] = four * K * (K + A) * (K + B) * (K + ab) / (d * d * (d + one) * (d - one));
    }
  }
  return rec;
}

Recurrence kronrod_recurrence(int n, const Recurrence& base) {
  const mpfr_prec_t prec = base.b[0].precision();
  const int need_a = (3 * n) / 2 + 1;
  const int need_b = (3 * n + 1) / 2 + 1;
  if (static_cast<int>(base.a.size()) < need_a || static_cast<int>(base.b.size()) < need_b)
    throw std::invalid_argument("kronrod_recurrence: base recurrence too short");

  std::vector<BigReal> a(2 * n + 1, BigReal::zero(prec));
  std::vector<BigReal> b(2 * n + 1, BigReal::zero(prec));
  for (int k = 0; k < need_a; ++k) a[k] = base.a[k];
  for (int k = 0; k < need_b; ++k) b[k] = base.b[k];

  std::vector<BigReal> s(n / 2 + 2, BigReal::zero(prec));
  std::vector<BigReal> t(n / 2 + 2, BigReal::zero(prec));
  t[1] = b[n + 1];
  for (int m = 0; m <= n - 2; ++m) {
    BigReal u = BigReal::zero(prec);
    for (int k = (m + 1) / 2; k >= 0; --k) {
      const int l = m - k;
      u += (a[k + n + 1] - a[l]) * t[k + 1] + b[k + n + 1] * s[k] - b[l] * s[k + 1];
      s[k + 1] = u;
    }
    std::swap(s, t);
  }
  for (int j = n / 2; j >= 0; --j) s[j + 1] = s[j];
  for (int m = n - 1; m <= 2 * n - 3; ++m) {
    BigReal u = BigReal::zero(prec);
    int j = 0;
    for (int k = m + 1 - n; k <= (m - 1) / 2; ++k) {
      const int l = m - k;
      j = n - 1 - l;
      u -= (a[k + n + 1] - a[l]) * t[j + 1] + b[k + n + 1] * s[j + 1] - b[l] * s[j + 2];
      s[j + 1] = u;
    }
    const int k = (m + 1) / 2;
    if (m % 2 == 0) {
      a[k + n + 1] = a[k] + (s[j + 1] - b[k + n + 1] * s[j + 2]) / t[j + 2];
    } else {
      b[k + n + 1] = s[j + 1] / s[j + 2];
    }
    std::swap(s, t);
  }
  a[2 * n] = a[n - 1] - b[2 * n] * s[1] / t[1];

  for (int k = 0; k <= 2 * n; ++k) {
    if (k > 0 && !(b[k] > BigReal::zero(prec)))
      throw NumericalError("kronrod_recurrence: extension has a nonpositive beta coefficient");
  }
  Recurrence out;
  out.a = std::move(a);
  out.b = std::move(b);
  return out;
}

namespace {

// Sturm count: number of eigenvalues of the m x m Jacobi matrix below x.
int sturm_count(const Recurrence& rec, int m, const BigReal& x, const BigReal& pivmin) {
  const mpfr_prec_t prec = x.precision();
  int count = 0;
  BigReal q = rec.a[0] - x;
  if (q.sign() < 0) ++count;
  for (int k = 1; k < m; ++k) {
    if (q.is_zero()) q = -pivmin;
    q = (rec.a[k] - x) - rec.b[k] / q;
    if (q.sign() < 0) ++count;
  }
  return count;
}

}  // namespace

void tridiag_nodes_weights(const Recurrence& rec, int m, mpfr_prec_t prec,
                           std::vector<BigReal>& nodes, std::vector<BigReal>& weights) {
  if (m < 1 || static_cast<int>(rec.a.size()) < m) throw std::invalid_argument("tridiag_nodes_weights: bad size");
  std::vector<BigReal> sb(m, BigReal::zero(prec));
  for (int k = 1; k < m; ++k) sb[k] = mp::sqrt(rec.b[k]);

  // Gershgorin bounds
  BigReal lo = rec.a[0], hi = rec.a[0];
  for (int k = 0; k < m; ++k) {
    BigReal r = BigReal::zero(prec);
    if (k > 0) r += sb[k];
    if (k + 1 < m) r += sb[k + 1];
    lo = mp::min(lo, rec.a[k] - r);
    hi = mp::max(hi, rec.a[k] + r);
  }
  BigReal width = hi - lo;
  if (!(width > BigReal::zero(prec))) width = BigReal(1.0, prec);
  BigReal pivmin = ldexp2(width, -2 * static_cast<long>(prec));

  nodes.assign(m, BigReal::zero(prec));
  const long iters = static_cast<long>(prec) + 4;
  for (int i = 0; i < m; ++i) {
    BigReal xlo = lo, xhi = hi;
    for (long it = 0; it < iters; ++it) {
      BigReal mid = ldexp2(xlo + xhi, -1);
      if (sturm_count(rec, m, mid, pivmin) <= i)
        xlo = mid;
      else
        xhi = mid;
    }
    nodes[i] = ldexp2(xlo + xhi, -1);
  }

  weights.assign(m, BigReal::zero(prec));
  BigReal q0 = BigReal(1.0, prec) / mp::sqrt(rec.b[0]);
  for (int i = 0; i < m; ++i) {
    BigReal qm1 = BigReal::zero(prec), q = q0;
    BigReal sum = q * q;
    for (int k = 0; k + 1 < m; ++k) {
      BigReal qn = ((nodes[i] - rec.a[k]) * q - sb[k] * qm1) / sb[k + 1];
      qm1 = q;
      q = qn;
      sum += q * q;
    }
    weights[i] = BigReal(1.0, prec) / sum;
  }
}

}  // namespace detail

namespace {

// Legendre nodes by Newton iteration on P_n, seeded from the asymptotic
// Chebyshev-angle approximation. Weights w = 2 / ((1-x^2) P_n'(x)^2).
void legendre_newton(int n, mpfr_prec_t prec, std::vector<BigReal>& nodes,
                     std::vector<BigReal>& weights) {
  nodes.assign(n, BigReal::zero(prec));
  weights.assign(n, BigReal::zero(prec));
  const BigReal one(1.0, prec), two(2.0, prec);
  BigReal thr = ldexp2(one, -(static_cast<long>(prec) - 8));
  for (int k = 1; k <= (n + 1) / 2; ++k) {
    const double nn = static_cast<double>(n);
    double seed = (1.0 - 1.0 / (8.0 * nn * nn) + 1.0 / (8.0 * nn * nn * nn)) *
                  std::cos(M_PI * (4.0 * k - 1.0) / (4.0 * nn + 2.0));
    BigReal x(seed, prec);
    if (2 * k == n + 1) x = BigReal::zero(prec);  // middle root of odd n is exactly 0
    BigReal pn = BigReal::zero(prec), pm = BigReal::zero(prec);
    for (int it = 0; it < 200; ++it) {
      // evaluate P_n, P_{n-1} by the standard recurrence
      BigReal p0 = one, p1 = x;
      for (int j = 2; j <= n; ++j) {
        BigReal pj = (BigReal(2.0 * j - 1.0, prec) * x * p1 - BigReal(j - 1.0, prec) * p0) /
                     BigReal(static_cast<double>(j), prec);
        p0 = p1;
        p1 = pj;
      }
      pn = (n == 1) ? x : p1;
      pm = (n == 1) ? one : p0;
      BigReal denom = x * x - one;
      if (denom.is_zero()) break;
      BigReal dpn = BigReal(static_cast<double>(n), prec) * (x * pn - pm) / denom;
      if (dpn.is_zero()) break;
      BigReal dx = pn / dpn;
      x = x - dx;
      if (mp::abs(dx) <= thr * (mp::abs(x) + thr)) {
        if (it > 2) break;
      }
    }
    // final derivative at the converged node
    BigReal p0 = one, p1 = x;
    for (int j = 2; j <= n; ++j) {
      BigReal pj = (BigReal(2.0 * j - 1.0, prec) * x * p1 - BigReal(j - 1.0, prec) * p0) /
                   BigReal(static_cast<double>(j), prec);
      p0 = p1;
      p1 = pj;
    }
    pn = (n == 1) ? x : p1;
    pm = (n == 1) ? one : p0;
    BigReal omx2 = one - x * x;
    BigReal dpn = BigReal(static_cast<double>(n), prec) * (x * pn - pm) / (x * x - one);
    BigReal w = two / (omx2 * dpn * dpn);
    nodes[n - k] = x;
    weights[n - k] = w;
    nodes[k - 1] = -x;
    weights[k - 1] = w;
  }
}

struct RuleKey {
  int family;
  int n;
  long prec;
  double ja, jb;
  bool operator<(const RuleKey& o) const {
    return std::tie(family, n, prec, ja, jb) < std::tie(o.family, o.n, o.prec, o.ja, o.jb);
  }
};

std::map<RuleKey, QuadratureRule> g_rule_cache;
std::mutex g_rule_mutex;

// Reference rule on [-1, 1].
QuadratureRule reference_rule(QuadratureRule::Family family, int n, mpfr_prec_t prec, double ja,
                              double jb) {
  RuleKey key{static_cast<int>(family), n, static_cast<long>(prec), ja, jb};
  {
    std::lock_guard<std::mutex> lk(g_rule_mutex);
    auto it = g_rule_cache.find(key);
    if (it != g_rule_cache.end()) return it->second;
  }
  QuadratureRule rule;
  rule.family = family;
  rule.prec = prec;
  rule.a = BigReal(-1.0, prec);
  rule.b = BigReal(1.0, prec);
  rule.jacobi_a = ja;
  rule.jacobi_b = jb;
  switch (family) {
    case QuadratureRule::Family::gauss_legendre:
      legendre_newton(n, prec, rule.nodes, rule.weights);
      break;
    case QuadratureRule::Family::gauss_jacobi: {
      auto rec = detail::jacobi_recurrence(n, ja, jb, prec);
      detail::tridiag_nodes_weights(rec, n, prec, rule.nodes, rule.weights);
      break;
    }
    case QuadratureRule::Family::gauss_kronrod: {
      auto base = detail::legendre_recurrence(2 * n + 2, prec);
      auto ext = detail::kronrod_recurrence(n, base);
      detail::tridiag_nodes_weights(ext, 2 * n + 1, prec, rule.nodes, rule.weights);
      std::vector<BigReal> gx, gw;
      legendre_newton(n, prec, gx, gw);
      // embedded Gauss nodes must interleave as the odd-index Kronrod nodes
      BigReal tol = ldexp2(BigReal(1.0, prec), -(static_cast<long>(prec) / 2));
      for (int j = 0; j < n; ++j) {
        if (mp::abs(rule.nodes[2 * j + 1] - gx[j]) > tol)
          throw NumericalError("gauss_kronrod: embedded nodes failed to interleave");
      }
      rule.gauss_weights = std::move(gw);
      break;
    }
  }
  {
    std::lock_guard<std::mutex> lk(g_rule_mutex);
    g_rule_cache.emplace(key, rule);
  }
  return rule;
}

}  // namespace

BigReal QuadratureRule::apply(const std::function<BigReal(const BigReal&)>& f) const {
  BigReal acc = BigReal::zero(prec);
  for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
  return acc;
}

QuadratureRule gauss_nodes(QuadratureRule::Family family, int n, const BigReal& a, const BigReal& b,
                           mpfr_prec_t prec, double jacobi_a, double jacobi_b) {
  if (n < 1) throw std::invalid_argument("gauss_nodes: n must be positive");
  QuadratureRule ref = reference_rule(family, n, prec, jacobi_a, jacobi_b);
  QuadratureRule out = ref;
  out.a = a;
  out.b = b;
  BigReal half = ldexp2(b - a, -1);
  BigReal mid = ldexp2(a + b, -1);
  for (auto& x : out.nodes) x = mid + half * x;
  BigReal wscale = half;
  if (family == QuadratureRule::Family::gauss_jacobi) {
    // weight function (b-t)^ja (t-a)^jb picks up extra powers of the half-width
    wscale = mp::pow(half, BigReal(jacobi_a + jacobi_b, prec) + BigReal(1.0, prec));
  }
  for (auto& w : out.weights) w = wscale * w;
  for (auto& w : out.gauss_weights) w = wscale * w;
  return out;
}

namespace {

template <class T>
struct ValueOps;

template <>
struct ValueOps<BigReal> {
  static BigReal zero(mpfr_prec_t prec) { return BigReal::zero(prec); }
  static BigReal absval(const BigReal& x) { return mp::abs(x); }
};

template <>
struct ValueOps<BigComplex> {
  static BigComplex zero(mpfr_prec_t prec) {
    return BigComplex(BigReal::zero(prec), BigReal::zero(prec));
  }
  static BigReal absval(const BigComplex& x) { return mp::abs(x); }
};

template <class T>
struct Panel {
  BigReal a, b, err;
  T val;
};

template <class T>
struct PanelWorse {
  bool operator()(const Panel<T>& p, const Panel<T>& q) const {
    if (p.err < q.err) return true;
    if (q.err < p.err) return false;
    return q.a < p.a;  // deterministic tie-break: leftmost panel wins
  }
};

template <class T>
Panel<T> eval_panel(const std::function<T(const BigReal&)>& f, const QuadratureRule& rule,
                    const BigReal& a, const BigReal& b, mpfr_prec_t prec) {
  Panel<T> p{a, b, BigReal::zero(prec), ValueOps<T>::zero(prec)};
  BigReal half = ldexp2(b - a, -1);
  BigReal mid = ldexp2(a + b, -1);
  T kron = ValueOps<T>::zero(prec);
  T gauss = ValueOps<T>::zero(prec);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    T fx = f(mid + half * rule.nodes[i]);
    kron += fx * rule.weights[i];
    if (i % 2 == 1) gauss += fx * rule.gauss_weights[i / 2];
  }
  p.val = kron * half;
  p.err = ValueOps<T>::absval((kron - gauss) * half);
  return p;
}

template <class T>
T integrate_adaptive_impl(const std::function<T(const BigReal&)>& f, const BigReal& a,
                          const BigReal& b, const BigReal& abs_tol, mpfr_prec_t prec,
                          AdaptiveStats* stats, const AdaptiveOptions& opt) {
  if (!(b > a)) {
    if (a == b) {
      if (stats) *stats = AdaptiveStats{BigReal::zero(prec), 0};
      return ValueOps<T>::zero(prec);
    }
    throw std::invalid_argument("integrate_adaptive: requires a <= b");
  }
  QuadratureRule rule = reference_rule(QuadratureRule::Family::gauss_kronrod, opt.gauss_n, prec,
                                       0.0, 0.0);
  std::priority_queue<Panel<T>, std::vector<Panel<T>>, PanelWorse<T>> heap;
  BigReal total_err = BigReal::zero(prec);
  Panel<T> first = eval_panel<T>(f, rule, BigReal(a).round_to(prec), BigReal(b).round_to(prec), prec);
  total_err = first.err;
  heap.push(std::move(first));
  int panels = 1;
  while (total_err > abs_tol) {
    if (panels >= opt.max_panels) {
      throw AccuracyError("integrate_adaptive: panel cap " + std::to_string(opt.max_panels) +
                          " reached, error bound " + total_err.to_string(6) + " > tolerance " +
                          abs_tol.to_string(6));
    }
    Panel<T> worst = heap.top();
    heap.pop();
    total_err -= worst.err;
    BigReal mid = ldexp2(worst.a + worst.b, -1);
    Panel<T> left = eval_panel<T>(f, rule, worst.a, mid, prec);
    Panel<T> right = eval_panel<T>(f, rule, mid, worst.b, prec);
    total_err += left.err + right.err;
    heap.push(std::move(left));
    heap.push(std::move(right));
    ++panels;
  }
  // drain in interval order for a reproducible summation order
  std::vector<Panel<T>> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel<T>& p, const Panel<T>& q) { return p.a < q.a; });
  T sum = ValueOps<T>::zero(prec);
  BigReal errsum = BigReal::zero(prec);
  for (const auto& p : all) {
    sum += p.val;
    errsum += p.err;
  }
  if (stats) *stats = AdaptiveStats{errsum, panels};
  return sum;
}

}  // namespace

BigReal integrate_adaptive(const std::function<BigReal(const BigReal&)>& f, const BigReal& a,
                           const BigReal& b, const BigReal& abs_tol, mpfr_prec_t prec,
                           AdaptiveStats* stats, const AdaptiveOptions& opt) {
  return integrate_adaptive_impl<BigReal>(f, a, b, abs_tol, prec, stats, opt);
}

BigComplex integrate_adaptive(const std::function<BigComplex(const BigReal&)>& f, const BigReal& a,
                              const BigReal& b, const BigReal& abs_tol, mpfr_prec_t prec,
                              AdaptiveStats* stats, const AdaptiveOptions& opt) {
  return integrate_adaptive_impl<BigComplex>(f, a, b, abs_tol, prec, stats, opt);
}

}  // namespace dofde::kernels
