#include <doctest.h>

#include <cmath>
#include <functional>

#include "dofde/errors.hpp"
#include "dofde/quadrature.hpp"

using dofde::kernels::AdaptiveStats;
using dofde::kernels::gauss_nodes;
using dofde::kernels::integrate_adaptive;
using dofde::kernels::QuadratureRule;
using dofde::mp::BigComplex;
using dofde::mp::BigReal;

namespace {

double rel_err(const BigReal& got, const BigReal& want) {
  BigReal d = dofde::mp::abs(got - want);
  BigReal scale = dofde::mp::max(BigReal(1.0, want.precision()), dofde::mp::abs(want));
  return (d / scale).to_double();
}

// 15-point Kronrod extension of 7-point Gauss-Legendre on [-1,1], nonnegative
// half, 42 digits.
const char* const k15_nodes[8] = {
    "0", "0.207784955007898467600689403773244913479784",
    "0.405845151377397166906606412076961463347382",
    "0.586087235467691130294144838258729598436781",
    "0.741531185599394439863864773280788407074148",
    "0.864864423359769072789712788640926201210972",
    "0.949107912342758524526189684047851262400771",
    "0.991455371120812639206854697526328516642044"};
const char* const k15_weights[8] = {
    "0.209482141084727828012999174891714263697762",
    "0.204432940075298892414161999234649084716518",
    "0.190350578064785409913256402421013682826078",
    "0.169004726639267902826583426598550284106245",
    "0.14065325971552591874518959051023792039989",
    "0.104790010322250183839876322541518017443757",
    "0.0630920926299785532907006631892042866650712",
    "0.0229353220105292249637320080589695919935608"};
const char* const g7_weights[4] = {
    "0.417959183673469387755102040816326530612245",
    "0.381830050505118944950369775488975133878365",
    "0.279705391489276667901467771423779582486925",
    "0.129484966168869693270611432679082018328587"};

}  // namespace

TEST_CASE("gauss-legendre small rules have the textbook nodes") {
  const mpfr_prec_t prec = 256;
  auto r1 = gauss_nodes(QuadratureRule::Family::gauss_legendre, 1, BigReal(-1.0, prec),
                        BigReal(1.0, prec), prec);
  REQUIRE(r1.nodes.size() == 1);
  CHECK(dofde::mp::abs(r1.nodes[0]).to_double() < 1e-70);
  CHECK(rel_err(r1.weights[0], BigReal(2.0, prec)) < 1e-70);

  auto r2 = gauss_nodes(QuadratureRule::Family::gauss_legendre, 2, BigReal(-1.0, prec),
                        BigReal(1.0, prec), prec);
  BigReal inv_sqrt3 = BigReal(1.0, prec) / dofde::mp::sqrt(BigReal(3.0, prec));
  CHECK(rel_err(r2.nodes[1], inv_sqrt3) < 1e-70);
  CHECK(rel_err(r2.nodes[0], -inv_sqrt3) < 1e-70);
  CHECK(rel_err(r2.weights[0], BigReal(1.0, prec)) < 1e-70);
  CHECK(rel_err(r2.weights[1], BigReal(1.0, prec)) < 1e-70);
}

TEST_CASE("gauss-legendre exactness up to degree 2n-1") {
  const mpfr_prec_t prec = 256;
  for (int n : {3, 8, 20, 64}) {
    auto r = gauss_nodes(QuadratureRule::Family::gauss_legendre, n, BigReal(-1.0, prec),
                         BigReal(1.0, prec), prec);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      BigReal got = r.apply([&](const BigReal& x) { return dofde::mp::pow(x, (long)k); });
      BigReal want = (k % 2 == 1) ? BigReal::zero(prec)
                                  : BigReal(2.0, prec) / BigReal(static_cast<double>(k + 1), prec);
      CHECK(std::abs((got - want).to_double()) < 1e-65);
    }
  }
}

TEST_CASE("kronrod 15-point rule matches reference digits") {
  const mpfr_prec_t prec = 256;
  auto r = gauss_nodes(QuadratureRule::Family::gauss_kronrod, 7, BigReal(-1.0, prec),
                       BigReal(1.0, prec), prec);
  REQUIRE(r.nodes.size() == 15);
  REQUIRE(r.gauss_weights.size() == 7);
  for (int i = 0; i < 8; ++i) {
    BigReal xn(k15_nodes[i], prec), wn(k15_weights[i], prec);
    CHECK(std::abs((r.nodes[7 + i] - xn).to_double()) < 1e-40);
    CHECK(std::abs((r.nodes[7 - i] + xn).to_double()) < 1e-40);
    CHECK(rel_err(r.weights[7 + i], wn) < 1e-40);
    CHECK(rel_err(r.weights[7 - i], wn) < 1e-40);
  }
  // embedded Gauss weights sit on odd-index nodes; center is gauss index 3
  for (int i = 0; i < 4; ++i) {
    BigReal wn(g7_weights[i], prec);
    CHECK(rel_err(r.gauss_weights[3 + i], wn) < 1e-40);
    CHECK(rel_err(r.gauss_weights[3 - i], wn) < 1e-40);
  }
}

TEST_CASE("kronrod rule is exact to degree 22") {
  const mpfr_prec_t prec = 320;
  auto r = gauss_nodes(QuadratureRule::Family::gauss_kronrod, 7, BigReal(-1.0, prec),
                       BigReal(1.0, prec), prec);
  for (int k = 0; k <= 22; ++k) {
    BigReal got = r.apply([&](const BigReal& x) { return dofde::mp::pow(x, (long)k); });
    BigReal want = (k % 2 == 1) ? BigReal::zero(prec)
                                : BigReal(2.0, prec) / BigReal(static_cast<double>(k + 1), prec);
    CHECK(std::abs((got - want).to_double()) < 1e-70);
  }
}

TEST_CASE("gauss-jacobi rule agrees with adaptive integration") {
  const mpfr_prec_t prec = 256;
  // weight (b-t)^0.5 on (0, 1), integrand t^4 + t
  auto r = gauss_nodes(QuadratureRule::Family::gauss_jacobi, 6, BigReal(0.0, prec),
                       BigReal(1.0, prec), prec, 0.5, 0.0);
  BigReal got = r.apply([&](const BigReal& t) { return dofde::mp::pow(t, 4L) + t; });
  auto f = [&](const BigReal& t) {
    return dofde::mp::sqrt(BigReal(1.0, prec) - t) * (dofde::mp::pow(t, 4L) + t);
  };
  BigReal want = integrate_adaptive(std::function<BigReal(const BigReal&)>(f), BigReal(0.0, prec),
                                    BigReal(1.0, prec), BigReal(1e-50, prec), prec);
  CHECK(rel_err(got, want) < 1e-45);
}

TEST_CASE("mapped interval: polynomial integrated exactly") {
  const mpfr_prec_t prec = 256;
  auto r = gauss_nodes(QuadratureRule::Family::gauss_legendre, 6, BigReal(2.0, prec),
                       BigReal(5.0, prec), prec);
  BigReal got = r.apply([&](const BigReal& x) { return dofde::mp::pow(x, 3L); });
  // int_2^5 x^3 = (625 - 16) / 4
  BigReal want = BigReal(609.0, prec) / BigReal(4.0, prec);
  CHECK(rel_err(got, want) < 1e-70);
}

TEST_CASE("adaptive integration: smooth, singular, logarithmic") {
  const mpfr_prec_t prec = 256;
  BigReal tol(1e-40, prec);

  auto smooth = [&](const BigReal& x) { return dofde::mp::exp(x); };
  BigReal got = integrate_adaptive(std::function<BigReal(const BigReal&)>(smooth),
                                   BigReal(0.0, prec), BigReal(1.0, prec), tol, prec);
  BigReal want = dofde::mp::exp(BigReal(1.0, prec)) - BigReal(1.0, prec);
  CHECK(rel_err(got, want) < 1e-39);

  // endpoint singularity t^(-1/2), exact value 2
  AdaptiveStats stats;
  auto sing = [&](const BigReal& x) { return BigReal(1.0, prec) / dofde::mp::sqrt(x); };
  got = integrate_adaptive(std::function<BigReal(const BigReal&)>(sing), BigReal(0.0, prec),
                           BigReal(1.0, prec), BigReal(1e-25, prec), prec, &stats);
  CHECK(std::abs((got - BigReal(2.0, prec)).to_double()) < 1e-24);
  CHECK(stats.panels > 10);
  CHECK(stats.error_bound.to_double() <= 2e-25);

  // integrable log singularity
  auto lg = [&](const BigReal& x) { return dofde::mp::log(x); };
  got = integrate_adaptive(std::function<BigReal(const BigReal&)>(lg), BigReal(0.0, prec),
                           BigReal(1.0, prec), BigReal(1e-25, prec), prec);
  CHECK(std::abs((got + BigReal(1.0, prec)).to_double()) < 1e-24);
}

TEST_CASE("adaptive integration of the gamma function") {
  const mpfr_prec_t prec = 256;
  auto f = [&](const BigReal& x) { return dofde::mp::gamma(x, prec); };
  BigReal got = integrate_adaptive(std::function<BigReal(const BigReal&)>(f), BigReal(3.0, prec),
                                   BigReal(4.0, prec), BigReal(1e-35, prec), prec);
  BigReal want("3.544335392489982962289912132203135954929", prec);
  CHECK(rel_err(got, want) < 1e-34);
}

TEST_CASE("complex adaptive integration") {
  const mpfr_prec_t prec = 256;
  auto f = [&](const BigReal& t) {
    return BigComplex(dofde::mp::cos(t), dofde::mp::sin(t));
  };
  BigComplex got = integrate_adaptive(std::function<BigComplex(const BigReal&)>(f),
                                      BigReal(0.0, prec), BigReal(1.0, prec), BigReal(1e-40, prec),
                                      prec);
  BigReal one(1.0, prec);
  CHECK(rel_err(got.re, dofde::mp::sin(one)) < 1e-39);
  CHECK(rel_err(got.im, one - dofde::mp::cos(one)) < 1e-39);
}

TEST_CASE("adaptive integration reports failure on divergent integrand") {
  const mpfr_prec_t prec = 128;
  auto f = [&](const BigReal& x) { return BigReal(1.0, prec) / x; };
  dofde::kernels::AdaptiveOptions opt;
  opt.max_panels = 200;
  CHECK_THROWS_AS(integrate_adaptive(std::function<BigReal(const BigReal&)>(f), BigReal(0.0, prec),
                                     BigReal(1.0, prec), BigReal(1e-30, prec), prec, nullptr, opt),
                  dofde::AccuracyError);
}

TEST_CASE("adaptive integration is deterministic") {
  const mpfr_prec_t prec = 256;
  auto f = [&](const BigReal& x) { return dofde::mp::sqrt(x) * dofde::mp::exp(-x); };
  auto run = [&] {
    return integrate_adaptive(std::function<BigReal(const BigReal&)>(f), BigReal(0.0, prec),
                              BigReal(3.0, prec), BigReal(1e-45, prec), prec);
  };
  CHECK(run().to_string(60) == run().to_string(60));
}

TEST_CASE("degenerate interval integrates to zero") {
  const mpfr_prec_t prec = 128;
  auto f = [&](const BigReal& x) { return x; };
  BigReal got = integrate_adaptive(std::function<BigReal(const BigReal&)>(f), BigReal(2.0, prec),
                                   BigReal(2.0, prec), BigReal(1e-20, prec), prec);
  CHECK(got.is_zero());
}
