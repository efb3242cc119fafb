#include "dofde/kernels.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

#include "dofde/errors.hpp"

namespace dofde::kernels {

namespace {

// The adaptive alpha-quadratures in eval_kernel revisit the same nodes for
// every t (panel subdivision is dyadic), and the gamma factor there is by far
// the costliest piece of the integrand. Same-value-same-precision lookups are
// exact, so caching changes no digits.
BigReal gamma_memo(const BigReal& x, mpfr_prec_t prec) {
  static std::map<std::pair<std::string, long>, BigReal> memo;
  static std::mutex mtx;
  mpfr_exp_t e = 0;
  char* digits = mpfr_get_str(nullptr, &e, 32, 0, x.raw(), MPFR_RNDN);
  std::string key = digits ? digits : "?";
  if (digits) mpfr_free_str(digits);
  key += '@';
  key += std::to_string(static_cast<long>(e));
  std::pair<std::string, long> k{std::move(key), static_cast<long>(prec)};
  {
    std::lock_guard<std::mutex> lk(mtx);
    auto it = memo.find(k);
    if (it != memo.end()) return it->second;
  }
  BigReal val = mp::gamma(x, prec);
  std::lock_guard<std::mutex> lk(mtx);
  if (memo.size() < 2000000) memo.emplace(std::move(k), val);
  return val;
}

void check_index(const WeightFunction& w, int index) {
  if (index < 1 || index > w.alpha_max)
    throw std::invalid_argument("kernel index must lie in [1, alpha_max]");
}

// integration bounds in alpha: support clipped to the unit interval
std::pair<double, double> alpha_bounds(const DOKernel& k) {
  double lo = std::max(static_cast<double>(k.index - 1), k.weight.support_lo);
  double hi = std::min(static_cast<double>(k.index), k.weight.support_hi);
  return {lo, hi};
}

// indices of discrete-weight terms living on (index-1, index]
std::vector<std::size_t> discrete_terms(const DOKernel& k) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < k.weight.orders.size(); ++j) {
    double a = k.weight.orders[j];
    if (a > k.index - 1 && a <= k.index) idx.push_back(j);
  }
  return idx;
}

}  // namespace

DOKernel make_kernel(const WeightFunction& w, int index, mpfr_prec_t prec) {
  check_index(w, index);
  DOKernel k;
  k.weight = w;
  k.index = index;
  k.prec = prec;
  return k;
}

DOKernel discretize_kernel(const WeightFunction& w, int index, int n_nodes, mpfr_prec_t prec) {
  check_index(w, index);
  if (w.discrete) throw std::invalid_argument("discretize_kernel: weight is already discrete");
  if (n_nodes < 1) throw std::invalid_argument("discretize_kernel: need at least one node");
  DOKernel k;
  k.weight = w;
  k.index = index;
  k.prec = prec;
  auto [lo, hi] = alpha_bounds(k);
  if (hi > lo) {
    k.rule = gauss_nodes(QuadratureRule::Family::gauss_legendre, n_nodes, BigReal(lo, prec),
                         BigReal(hi, prec), prec);
  }
  return k;
}

bool kernel_is_discrete(const DOKernel& k) { return k.weight.discrete || k.rule.has_value(); }

bool kernel_is_zero(const DOKernel& k) {
  if (k.weight.discrete) return discrete_terms(k).empty();
  auto [lo, hi] = alpha_bounds(k);
  return !(hi > lo);
}

std::string kernel_id(const DOKernel& k) {
  std::string id = k.weight.id + ":i" + std::to_string(k.index);
  if (k.rule) {
    switch (k.rule->family) {
      case QuadratureRule::Family::gauss_legendre:
        id += ":gl";
        break;
      case QuadratureRule::Family::gauss_jacobi:
        id += ":gj";
        break;
      case QuadratureRule::Family::gauss_kronrod:
        id += ":gk";
        break;
    }
    id += std::to_string(k.rule->nodes.size());
  }
  return id;
}

BigReal eval_kernel(const DOKernel& k, const BigReal& t) {
  const mpfr_prec_t prec = k.prec;
  if (!(t > BigReal::zero(prec))) throw std::domain_error("eval_kernel: t must be positive");
  BigReal tt = t.round_to(prec);
  const BigReal im1(static_cast<double>(k.index - 1), prec);
  const BigReal iv(static_cast<double>(k.index), prec);
  BigReal acc = BigReal::zero(prec);
  if (k.weight.discrete) {
    for (std::size_t j : discrete_terms(k)) {
      BigReal a(k.weight.orders[j], prec);
      acc += BigReal(k.weight.coeffs[j], prec) * mp::pow(tt, im1 - a) / mp::gamma(iv - a, prec);
    }
    return acc;
  }
  if (k.rule) {
    const auto& r = *k.rule;
    for (std::size_t j = 0; j < r.nodes.size(); ++j) {
      const BigReal& a = r.nodes[j];
      acc += r.weights[j] * k.weight.eval(a, prec) * mp::pow(tt, im1 - a) /
             mp::gamma(iv - a, prec);
    }
    return acc;
  }
  auto [lo, hi] = alpha_bounds(k);
  if (!(hi > lo)) return acc;
  BigReal lnt = mp::log(tt);
  auto f = [&](const BigReal& a) {
    return k.weight.eval(a, prec) * mp::exp((im1 - a) * lnt) / gamma_memo(iv - a, prec);
  };
  return integrate_adaptive(std::function<BigReal(const BigReal&)>(f), BigReal(lo, prec),
                            BigReal(hi, prec), BigReal(k.quad_abs_tol, prec), prec);
}

BigReal eval_laplace(const DOKernel& k, const BigReal& s) {
  const mpfr_prec_t prec = k.prec;
  if (!(s > BigReal::zero(prec)))
    throw std::domain_error("eval_laplace: need Re(s) > 0");
  BigReal ss = s.round_to(prec);
  const BigReal iv(static_cast<double>(k.index), prec);
  BigReal acc = BigReal::zero(prec);
  if (k.weight.discrete) {
    for (std::size_t j : discrete_terms(k)) {
      BigReal a(k.weight.orders[j], prec);
      acc += BigReal(k.weight.coeffs[j], prec) * mp::pow(ss, a - iv);
    }
    return acc;
  }
  if (k.rule) {
    const auto& r = *k.rule;
    for (std::size_t j = 0; j < r.nodes.size(); ++j)
      acc += r.weights[j] * k.weight.eval(r.nodes[j], prec) * mp::pow(ss, r.nodes[j] - iv);
    return acc;
  }
  auto [lo, hi] = alpha_bounds(k);
  if (!(hi > lo)) return acc;
  BigReal lns = mp::log(ss);
  auto f = [&](const BigReal& a) { return k.weight.eval(a, prec) * mp::exp((a - iv) * lns); };
  return integrate_adaptive(std::function<BigReal(const BigReal&)>(f), BigReal(lo, prec),
                            BigReal(hi, prec), BigReal(k.quad_abs_tol, prec), prec);
}

BigComplex eval_laplace(const DOKernel& k, const BigComplex& s) {
  const mpfr_prec_t prec = k.prec;
  if (!(s.re > BigReal::zero(prec)))
    throw std::domain_error("eval_laplace: need Re(s) > 0");
  BigComplex ss{s.re.round_to(prec), s.im.round_to(prec)};
  const BigReal iv(static_cast<double>(k.index), prec);
  BigComplex lns = mp::log(ss);
  auto spow = [&](const BigReal& e) {
    return mp::exp(BigComplex{e * lns.re, e * lns.im});
  };
  BigComplex acc(BigReal::zero(prec), BigReal::zero(prec));
  if (k.weight.discrete) {
    for (std::size_t j : discrete_terms(k)) {
      BigReal a(k.weight.orders[j], prec);
      acc += BigReal(k.weight.coeffs[j], prec) * spow(a - iv);
    }
    return acc;
  }
  if (k.rule) {
    const auto& r = *k.rule;
    for (std::size_t j = 0; j < r.nodes.size(); ++j)
      acc += (r.weights[j] * k.weight.eval(r.nodes[j], prec)) * spow(r.nodes[j] - iv);
    return acc;
  }
  auto [lo, hi] = alpha_bounds(k);
  if (!(hi > lo)) return acc;
  auto f = [&](const BigReal& a) { return k.weight.eval(a, prec) * spow(a - iv); };
  return integrate_adaptive(std::function<BigComplex(const BigReal&)>(f), BigReal(lo, prec),
                            BigReal(hi, prec), BigReal(k.quad_abs_tol, prec), prec);
}

}  // namespace dofde::kernels
