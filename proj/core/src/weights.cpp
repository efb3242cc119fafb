#include "dofde/weights.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>

#include "dofde/errors.hpp"
#include "dofde/quadrature.hpp"

namespace dofde::kernels {

namespace {

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

bool is_integer(double v) { return v == std::floor(v); }

BigReal bump_raw(const BigReal& a, double c, double r, mpfr_prec_t prec) {
  BigReal d = a - BigReal(c, prec);
  BigReal rr = BigReal(r, prec);
  BigReal q = d * d - rr * rr;
  if (q.sign() >= 0) return BigReal::zero(prec);
  return mp::exp(BigReal(1.0, prec) / q);
}

std::map<std::tuple<double, double, int>, BigReal> g_bump_mass;
std::mutex g_bump_mutex;

// The alpha-integral quadratures re-evaluate the weight at recurring nodes
// (panel subdivision is dyadic, so node sets repeat across Laplace samples).
// Memoizing phi(alpha) per exact (value, precision) pair cuts kernel sampling
// cost by the price of the gamma evaluations without changing any result.
std::string exact_key(const BigReal& a) {
  mpfr_exp_t e = 0;
  char* digits = mpfr_get_str(nullptr, &e, 32, 0, a.raw(), MPFR_RNDN);
  std::string key = digits ? digits : "?";
  if (digits) mpfr_free_str(digits);
  key += '@';
  key += std::to_string(static_cast<long>(e));
  return key;
}

WeightFunction memoize_eval(WeightFunction w) {
  auto inner = w.eval;
  auto memo = std::make_shared<std::map<std::pair<std::string, long>, BigReal>>();
  auto mtx = std::make_shared<std::mutex>();
  w.eval = [inner, memo, mtx](const BigReal& a, mpfr_prec_t prec) {
    std::pair<std::string, long> key{exact_key(a), static_cast<long>(prec)};
    {
      std::lock_guard<std::mutex> lk(*mtx);
      auto it = memo->find(key);
      if (it != memo->end()) return it->second;
    }
    BigReal val = inner(a, prec);
    std::lock_guard<std::mutex> lk(*mtx);
    if (memo->size() < 2000000) memo->emplace(std::move(key), val);
    return val;
  };
  return w;
}

BigReal bump_mass(double c, double r, int alpha_max) {
  const auto key = std::make_tuple(c, r, alpha_max);
  {
    std::lock_guard<std::mutex> lk(g_bump_mutex);
    auto it = g_bump_mass.find(key);
    if (it != g_bump_mass.end()) return it->second;
  }
  const mpfr_prec_t prec = 320;
  BigReal lo(std::max(0.0, c - r), prec);
  BigReal hi(std::min(static_cast<double>(alpha_max), c + r), prec);
  if (!(hi > lo)) throw std::invalid_argument("bump support does not meet [0, alpha_max]");
  auto f = [&](const BigReal& a) { return bump_raw(a, c, r, prec); };
  // coarse pass sets the scale, then refine to ~45 relative digits
  QuadratureRule coarse_rule =
      gauss_nodes(QuadratureRule::Family::gauss_legendre, 64, lo, hi, prec);
  BigReal coarse = coarse_rule.apply(f);
  if (coarse.sign() <= 0) throw NumericalError("bump mass estimate is nonpositive");
  BigReal mass = integrate_adaptive(std::function<BigReal(const BigReal&)>(f), lo, hi,
                                    coarse * BigReal(1e-45, prec), prec);
  {
    std::lock_guard<std::mutex> lk(g_bump_mutex);
    g_bump_mass.emplace(key, mass);
  }
  return mass;
}

}  // namespace

WeightFunction make_exm1() {
  WeightFunction w;
  w.id = "exm1";
  w.alpha_max = 2;
  w.support_lo = 0.0;
  w.support_hi = 2.0;
  w.eval = [](const BigReal& a, mpfr_prec_t prec) {
    return mp::exp(-a) * mp::gamma(BigReal(6.0, prec) - a, prec);
  };
  return memoize_eval(std::move(w));
}

WeightFunction make_exm2() {
  WeightFunction w;
  w.id = "exm2";
  w.alpha_max = 2;
  w.support_lo = 0.0;
  w.support_hi = 2.0;
  w.eval = [](const BigReal& a, mpfr_prec_t prec) {
    return mp::gamma(BigReal(4.0, prec) - a, prec);
  };
  return memoize_eval(std::move(w));
}

WeightFunction make_bump(double center, double radius, int alpha_max) {
  if (!(radius > 0.0)) throw std::invalid_argument("bump radius must be positive");
  if (alpha_max < 1) throw std::invalid_argument("alpha_max must be >= 1");
  BigReal mass = bump_mass(center, radius, alpha_max);
  WeightFunction w;
  w.id = "bump:" + fmt_g(center) + ":" + fmt_g(radius) + ":" + std::to_string(alpha_max);
  w.alpha_max = alpha_max;
  w.support_lo = std::max(0.0, center - radius);
  w.support_hi = std::min(static_cast<double>(alpha_max), center + radius);
  w.eval = [center, radius, mass](const BigReal& a, mpfr_prec_t prec) {
    return bump_raw(a, center, radius, prec) / mass;
  };
  return memoize_eval(std::move(w));
}

WeightFunction make_single_order(double alpha) {
  if (!(alpha > 0.0) || is_integer(alpha))
    throw std::invalid_argument("single order must be positive and non-integer");
  WeightFunction w;
  w.id = "rl:" + fmt_g(alpha);
  w.alpha_max = static_cast<int>(std::ceil(alpha));
  w.discrete = true;
  w.support_lo = alpha;
  w.support_hi = alpha;
  w.orders = {alpha};
  w.coeffs = {1.0};
  return w;
}

WeightFunction make_multiterm(const std::vector<double>& orders,
                              const std::vector<double>& coeffs) {
  if (orders.empty() || orders.size() != coeffs.size())
    throw std::invalid_argument("multiterm needs matching non-empty orders/coeffs");
  double lo = orders[0], hi = orders[0];
  for (double a : orders) {
    if (!(a > 0.0) || is_integer(a))
      throw std::invalid_argument("multiterm orders must be positive and non-integer");
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  WeightFunction w;
  w.id = "multiterm";
  for (std::size_t k = 0; k < orders.size(); ++k)
    w.id += ":" + fmt_g(orders[k]) + ":" + fmt_g(coeffs[k]);
  w.alpha_max = static_cast<int>(std::ceil(hi));
  w.discrete = true;
  w.support_lo = lo;
  w.support_hi = hi;
  w.orders = orders;
  w.coeffs = coeffs;
  return w;
}

WeightFunction weight_from_id(const std::string& id) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= id.size()) {
    std::size_t next = id.find(':', pos);
    if (next == std::string::npos) next = id.size();
    parts.push_back(id.substr(pos, next - pos));
    pos = next + 1;
  }
  auto want = [&](std::size_t n) {
    if (parts.size() != n + 1) throw std::invalid_argument("weight id '" + id + "': bad arity");
  };
  try {
    if (parts[0] == "exm1") {
      want(0);
      return make_exm1();
    }
    if (parts[0] == "exm2") {
      want(0);
      return make_exm2();
    }
    if (parts[0] == "bump") {
      want(3);
      return make_bump(std::stod(parts[1]), std::stod(parts[2]), std::stoi(parts[3]));
    }
    if (parts[0] == "rl") {
      want(1);
      return make_single_order(std::stod(parts[1]));
    }
    if (parts[0] == "multiterm") {
      if (parts.size() < 3 || parts.size() % 2 == 0)
        throw std::invalid_argument("weight id '" + id + "': bad arity");
      std::vector<double> orders, coeffs;
      for (std::size_t k = 1; k + 1 < parts.size(); k += 2) {
        orders.push_back(std::stod(parts[k]));
        coeffs.push_back(std::stod(parts[k + 1]));
      }
      return make_multiterm(orders, coeffs);
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    throw std::invalid_argument("weight id '" + id + "': " + e.what());
  }
  throw std::invalid_argument("unknown weight id '" + id + "'");
}

std::vector<std::pair<int, WeightFunction>> split_sign(const WeightFunction& w) {
  std::vector<std::pair<int, WeightFunction>> out;
  if (!w.discrete) {
    out.emplace_back(1, w);
    return out;
  }
  WeightFunction pos = w, neg = w;
  pos.orders.clear();
  pos.coeffs.clear();
  neg.orders.clear();
  neg.coeffs.clear();
  for (std::size_t k = 0; k < w.orders.size(); ++k) {
    if (w.coeffs[k] > 0.0) {
      pos.orders.push_back(w.orders[k]);
      pos.coeffs.push_back(w.coeffs[k]);
    } else if (w.coeffs[k] < 0.0) {
      neg.orders.push_back(w.orders[k]);
      neg.coeffs.push_back(-w.coeffs[k]);
    }
  }
  if (neg.orders.empty()) {
    out.emplace_back(1, w);  // already sign-definite, keep identity
    return out;
  }
  if (!pos.orders.empty()) {
    pos.id = w.id + ":pos";
    out.emplace_back(1, pos);
  }
  if (!neg.orders.empty()) {
    neg.id = w.id + ":neg";
    out.emplace_back(-1, neg);
  }
  return out;
}

}  // namespace dofde::kernels
