#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dofde/bigfloat.hpp"
#include "dofde/errors.hpp"

namespace dofde::mp {

// Column-major dense matrix. Works for double, BigReal, BigComplex.
template <class T>
class Matrix {
 public:
  Matrix() : r_(0), c_(0) {}
  Matrix(std::size_t r, std::size_t c) : r_(r), c_(c), a_(r * c) {}
  Matrix(std::size_t r, std::size_t c, const T& fill) : r_(r), c_(c), a_(r * c, fill) {}

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  T& operator()(std::size_t i, std::size_t j) { return a_[j * r_ + i]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[j * r_ + i]; }
  T* col(std::size_t j) { return a_.data() + j * r_; }
  const T* col(std::size_t j) const { return a_.data() + j * r_; }

 private:
  std::size_t r_, c_;
  std::vector<T> a_;
};

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  using Real = double;
  static constexpr bool is_complex = false;
  static double make(double v, long) { return v; }
  static long prec_of(double) { return 53; }
  static double real(double x) { return x; }
  static double abs2(double x) { return x * x; }
  static double abs_val(double x) { return std::fabs(x); }
  static double conj_val(double x) { return x; }
  static double phase(double x) { return x < 0 ? -1.0 : 1.0; }
  static double from_real(double r) { return r; }
  static double sqrt_val(double x) { return std::sqrt(x); }
};

template <>
struct ScalarTraits<BigReal> {
  using Real = BigReal;
  static constexpr bool is_complex = false;
  static BigReal make(double v, long prec) { return BigReal(v, prec); }
  static long prec_of(const BigReal& x) { return x.precision(); }
  static const BigReal& real(const BigReal& x) { return x; }
  static BigReal abs2(const BigReal& x) { return x * x; }
  static BigReal abs_val(const BigReal& x) { return abs(x); }
  static const BigReal& conj_val(const BigReal& x) { return x; }
  static BigReal phase(const BigReal& x) {
    return BigReal(x.sign() < 0 ? -1.0 : 1.0, x.precision());
  }
  static const BigReal& from_real(const BigReal& r) { return r; }
  static BigReal sqrt_val(const BigReal& x) { return sqrt(x); }
};

template <>
struct ScalarTraits<BigComplex> {
  using Real = BigReal;
  static constexpr bool is_complex = true;
  static BigComplex make(double v, long prec) { return BigComplex(v, 0.0, prec); }
  static long prec_of(const BigComplex& x) { return x.precision(); }
  static const BigReal& real(const BigComplex& x) { return x.re; }
  static BigReal abs2(const BigComplex& x) { return mp::abs2(x); }
  static BigReal abs_val(const BigComplex& x) { return abs(x); }
  static BigComplex conj_val(const BigComplex& x) { return conj(x); }
  static BigComplex phase(const BigComplex& x) {
    BigReal m = abs(x);
    if (m.is_zero()) return BigComplex(1.0, 0.0, x.precision());
    return {x.re / m, x.im / m};
  }
  static BigComplex from_real(const BigReal& r) { return BigComplex(r); }
};

template <class T>
Matrix<T> make_identity(std::size_t n, long prec) {
  Matrix<T> m(n, n, ScalarTraits<T>::make(0.0, prec));
  for (std::size_t i = 0; i < n; ++i) m(i, i) = ScalarTraits<T>::make(1.0, prec);
  return m;
}

// Fused column kernels. The generic versions are fine for double; BigReal gets
// raw-mpfr versions below since these loops dominate the compression runtime.
template <class S>
struct DenseKernels {
  using TR = ScalarTraits<S>;
  using Real = typename TR::Real;

  // sum_i conj(u_i) v_i
  static S dot_conj(const S* u, const S* v, std::size_t n, long prec) {
    S acc = TR::make(0.0, prec);
    for (std::size_t i = 0; i < n; ++i) acc += TR::conj_val(u[i]) * v[i];
    return acc;
  }
  static Real norm2(const S* u, std::size_t n, long prec) {
    Real acc = ScalarTraits<Real>::make(0.0, prec);
    for (std::size_t i = 0; i < n; ++i) acc += TR::abs2(u[i]);
    return acc;
  }
  // y += a x
  static void axpy(S* y, const S& a, const S* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
  }
  // [u v] <- [u v] * [[c, s*ph], [-s*conj(ph), c]]
  static void rotate(S* u, S* v, std::size_t n, const Real& c, const Real& s, const S& ph) {
    S sp = TR::from_real(s) * ph;
    S spc = TR::conj_val(sp);
    for (std::size_t i = 0; i < n; ++i) {
      S ui = u[i];
      u[i] = TR::from_real(c) * ui - spc * v[i];
      v[i] = sp * ui + TR::from_real(c) * v[i];
    }
  }
};

template <>
struct DenseKernels<BigReal> {
  using Real = BigReal;

  static BigReal dot_conj(const BigReal* u, const BigReal* v, std::size_t n, long prec) {
    BigReal acc(0.0, prec);
    for (std::size_t i = 0; i < n; ++i)
      mpfr_fma(acc.raw(), u[i].raw(), v[i].raw(), acc.raw(), MPFR_RNDN);
    return acc;
  }
  static BigReal norm2(const BigReal* u, std::size_t n, long prec) {
    BigReal acc(0.0, prec);
    for (std::size_t i = 0; i < n; ++i)
      mpfr_fma(acc.raw(), u[i].raw(), u[i].raw(), acc.raw(), MPFR_RNDN);
    return acc;
  }
  static void axpy(BigReal* y, const BigReal& a, const BigReal* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
      mpfr_fma(y[i].raw(), a.raw(), x[i].raw(), y[i].raw(), MPFR_RNDN);
  }
  static void rotate(BigReal* u, BigReal* v, std::size_t n, const BigReal& c,
                     const BigReal& s, const BigReal& ph) {
    long prec = std::max(c.precision(), u[0].precision());
    BigReal sp = s * ph;
    BigReal t1(0.0, prec), t2(0.0, prec);
    for (std::size_t i = 0; i < n; ++i) {
      mpfr_mul(t1.raw(), c.raw(), u[i].raw(), MPFR_RNDN);       // c*u
      mpfr_mul(t2.raw(), sp.raw(), v[i].raw(), MPFR_RNDN);      // sp*v
      mpfr_mul(v[i].raw(), c.raw(), v[i].raw(), MPFR_RNDN);     // c*v
      mpfr_fma(v[i].raw(), sp.raw(), u[i].raw(), v[i].raw(), MPFR_RNDN);
      mpfr_sub(u[i].raw(), t1.raw(), t2.raw(), MPFR_RNDN);
    }
  }
};

// ---- dense LU solve (partial pivoting) ----

// Solves M X = B in place; returns X. Throws NumericalError on a zero pivot.
template <class T>
Matrix<T> solve_dense_multi(Matrix<T> M, Matrix<T> B) {
  using TR = ScalarTraits<T>;
  const std::size_t n = M.rows();
  if (M.cols() != n || B.rows() != n)
    throw std::invalid_argument("solve_dense: dimension mismatch");
  long prec = n ? TR::prec_of(M(0, 0)) : 53;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    auto best = TR::abs2(M(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      auto cand = TR::abs2(M(i, k));
      if (best < cand) {
        best = cand;
        piv = i;
      }
    }
    if (!(ScalarTraits<typename TR::Real>::make(0.0, prec) < best))
      throw NumericalError("solve_dense: singular matrix (zero pivot at column " +
                           std::to_string(k) + ")");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(M(k, j), M(piv, j));
      for (std::size_t j = 0; j < B.cols(); ++j) std::swap(B(k, j), B(piv, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      T f = M(i, k) / M(k, k);
      for (std::size_t j = k + 1; j < n; ++j) M(i, j) -= f * M(k, j);
      for (std::size_t j = 0; j < B.cols(); ++j) B(i, j) -= f * B(k, j);
    }
  }
  for (std::size_t j = 0; j < B.cols(); ++j) {
    for (std::size_t ii = n; ii-- > 0;) {
      T acc = B(ii, j);
      for (std::size_t l = ii + 1; l < n; ++l) acc -= M(ii, l) * B(l, j);
      B(ii, j) = acc / M(ii, ii);
    }
  }
  return B;
}

template <class T>
std::vector<T> solve_dense(const Matrix<T>& M, const std::vector<T>& rhs) {
  Matrix<T> B(rhs.size(), 1);
  for (std::size_t i = 0; i < rhs.size(); ++i) B(i, 0) = rhs[i];
  Matrix<T> X = solve_dense_multi(M, std::move(B));
  std::vector<T> x(rhs.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) x[i] = X(i, 0);
  return x;
}

// ---- SVD: one-sided Jacobi with Householder-QR preconditioning ----

struct SvdOptions {
  int max_sweeps = 40;
  // Relative off-diagonal threshold; 0 means 2^-(prec-6).
  double threshold = 0.0;
  bool qr_precondition = true;
};

template <class T>
struct SvdResult {
  std::vector<typename ScalarTraits<T>::Real> sigma;  // descending
  Matrix<T> V;                                        // right singular vectors, columns
  int sweeps = 0;
};

namespace detail {

// In-place Householder reduction; on return the upper triangle of the leading
// cols x cols block is R. Q is discarded (right singular vectors of R equal
// those of the input).
template <class T>
void qr_inplace(Matrix<T>& A) {
  using TR = ScalarTraits<T>;
  using K = DenseKernels<T>;
  const std::size_t m = A.rows(), n = A.cols();
  long prec = TR::prec_of(A(0, 0));
  std::vector<T> v(m);
  for (std::size_t j = 0; j < n; ++j) {
    T* colj = A.col(j);
    auto nrm2 = K::norm2(colj + j, m - j, prec);
    if (!(ScalarTraits<typename TR::Real>::make(0.0, prec) < nrm2)) continue;
    auto nrm = ScalarTraits<typename TR::Real>::sqrt_val(nrm2);
    T ph = TR::phase(colj[j]);
    T alpha = ph * TR::from_real(nrm);
    for (std::size_t i = j; i < m; ++i) v[i] = colj[i];
    v[j] += alpha;  // v = x + phase*||x|| e1  (reflects x onto -alpha e1)
    auto vnrm2 = K::norm2(v.data() + j, m - j, prec);
    if (!(ScalarTraits<typename TR::Real>::make(0.0, prec) < vnrm2)) continue;
    for (std::size_t l = j + 1; l < n; ++l) {
      T w = K::dot_conj(v.data() + j, A.col(l) + j, m - j, prec);
      T coef = TR::make(-2.0, prec) * (w / TR::from_real(vnrm2));
      K::axpy(A.col(l) + j, coef, v.data() + j, m - j);
    }
    colj[j] = -alpha;
    for (std::size_t i = j + 1; i < m; ++i) colj[i] = TR::make(0.0, prec);
  }
}

}  // namespace detail

// Computes singular values (descending) and right singular vectors of an
// m x n matrix, m >= n. Accuracy target is the working precision of the
// entries. Throws NumericalError if the sweep cap is hit.
template <class T>
SvdResult<T> jacobi_svd(Matrix<T> A, const SvdOptions& opt = {}) {
  using TR = ScalarTraits<T>;
  using Real = typename TR::Real;
  using K = DenseKernels<T>;
  const std::size_t m = A.rows(), n = A.cols();
  if (m < n) throw std::invalid_argument("jacobi_svd: requires rows >= cols");
  if (n == 0) return {};
  long prec = TR::prec_of(A(0, 0));

  SvdResult<T> out;
  out.V = make_identity<T>(n, prec);
  if (opt.qr_precondition && m > n + 8) {
    detail::qr_inplace(A);
    Matrix<T> R(n, n, TR::make(0.0, prec));
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i <= j; ++i) R(i, j) = A(i, j);
    A = std::move(R);
  }
  const std::size_t rows = A.rows();

  Real thr = ScalarTraits<Real>::make(opt.threshold, prec);
  if (opt.threshold <= 0.0) {
    // 2^-(prec-6); built by halving so any precision works
    thr = ScalarTraits<Real>::make(1.0, prec);
    for (long b = 0; b < prec - 6; ++b) thr = thr / 2l;
  }
  Real zero = ScalarTraits<Real>::make(0.0, prec);
  Real one = ScalarTraits<Real>::make(1.0, prec);

  std::vector<Real> cn(n, zero);
  bool converged = false;
  int sweep = 0;
  for (; sweep < opt.max_sweeps; ++sweep) {
    for (std::size_t j = 0; j < n; ++j) cn[j] = K::norm2(A.col(j), rows, prec);
    Real maxn2 = zero;
    for (std::size_t j = 0; j < n; ++j) maxn2 = max(maxn2, cn[j]);
    Real floor2 = maxn2 * thr * thr;  // columns below this are numerically zero

    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      // de Rijk pivoting: work on the largest remaining column first
      std::size_t piv = p;
      for (std::size_t r = p + 1; r < n; ++r)
        if (cn[piv] < cn[r]) piv = r;
      if (piv != p) {
        for (std::size_t i = 0; i < rows; ++i) std::swap(A(i, p), A(i, piv));
        for (std::size_t i = 0; i < n; ++i) std::swap(out.V(i, p), out.V(i, piv));
        std::swap(cn[p], cn[piv]);
      }
      for (std::size_t q = p + 1; q < n; ++q) {
        if (!(floor2 < cn[p]) && !(floor2 < cn[q])) continue;
        T g = K::dot_conj(A.col(p), A.col(q), rows, prec);
        Real g2 = TR::abs2(g);
        if (!(thr * thr * cn[p] * cn[q] < g2)) continue;
        rotated = true;
        Real ga = ScalarTraits<Real>::sqrt_val(g2);
        T ph = TR::phase(g);
        Real zeta = (cn[q] - cn[p]) / (ga * 2l);
        Real az = ScalarTraits<Real>::abs_val(zeta);
        Real t = one / (az + ScalarTraits<Real>::sqrt_val(one + az * az));
        if (zeta < zero) t = -t;
        Real c = one / ScalarTraits<Real>::sqrt_val(one + t * t);
        Real s = c * t;
        K::rotate(A.col(p), A.col(q), rows, c, s, ph);
        K::rotate(out.V.col(p), out.V.col(q), n, c, s, ph);
        // keep cached norms usable within the sweep; a cancelling update is
        // untrustworthy, recompute it from the column
        Real app = cn[p], aqq = cn[q];
        Real half = one / 2l;
        cn[p] = app - t * ga;
        cn[q] = aqq + t * ga;
        if (!(app * half < cn[p])) cn[p] = K::norm2(A.col(p), rows, prec);
        if (!(aqq * half < cn[q])) cn[q] = K::norm2(A.col(q), rows, prec);
      }
    }
    if (!rotated) {
      converged = true;
      break;
    }
  }
  if (!converged && opt.max_sweeps > 0) {
    // final verification pass: only genuine non-convergence is fatal
    bool clean = true;
    for (std::size_t j = 0; j < n; ++j) cn[j] = K::norm2(A.col(j), rows, prec);
    for (std::size_t p = 0; p + 1 < n && clean; ++p)
      for (std::size_t q = p + 1; q < n && clean; ++q)
        if (thr * thr * cn[p] * cn[q] < TR::abs2(K::dot_conj(A.col(p), A.col(q), rows, prec)))
          clean = false;
    if (!clean)
      throw NumericalError("jacobi_svd: no convergence after " +
                           std::to_string(opt.max_sweeps) + " sweeps");
    converged = true;
  }
  out.sweeps = sweep + (converged ? 0 : 1);

  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < n; ++j) order[j] = j;
  std::vector<Real> nrm(n, zero);
  for (std::size_t j = 0; j < n; ++j)
    nrm[j] = ScalarTraits<Real>::sqrt_val(K::norm2(A.col(j), rows, prec));
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return nrm[b] < nrm[a]; });
  out.sigma.reserve(n);
  Matrix<T> V(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.sigma.push_back(nrm[order[j]]);
    for (std::size_t i = 0; i < n; ++i) V(i, j) = out.V(i, order[j]);
  }
  out.V = std::move(V);
  return out;
}

}  // namespace dofde::mp
