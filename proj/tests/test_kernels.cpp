#include <doctest.h>

#include <cmath>
#include <functional>
#include <stdexcept>

#include "dofde/kernels.hpp"
#include "dofde/quadrature.hpp"
#include "dofde/weights.hpp"

using namespace dofde::kernels;
using dofde::mp::BigComplex;
using dofde::mp::BigReal;

namespace {

double rel_err(const BigReal& got, const BigReal& want) {
  BigReal d = dofde::mp::abs(got - want);
  BigReal scale = dofde::mp::max(BigReal(1.0, want.precision()), dofde::mp::abs(want));
  return (d / scale).to_double();
}

}  // namespace

TEST_CASE("weight registry round-trips ids") {
  for (const char* id : {"exm1", "exm2", "bump:2:0.5:2", "rl:0.5", "multiterm:0.5:1:1.5:-2"}) {
    WeightFunction w = weight_from_id(id);
    CHECK(w.id == id);
    WeightFunction w2 = weight_from_id(w.id);
    CHECK(w2.id == w.id);
    CHECK(w2.alpha_max == w.alpha_max);
  }
  CHECK_THROWS_AS(weight_from_id("nope"), std::invalid_argument);
  CHECK_THROWS_AS(weight_from_id("bump:2:0.5"), std::invalid_argument);
  CHECK_THROWS_AS(weight_from_id("rl:1"), std::invalid_argument);    // integer order
  CHECK_THROWS_AS(weight_from_id("rl:-0.5"), std::invalid_argument);
  CHECK_THROWS_AS(weight_from_id("multiterm:0.5"), std::invalid_argument);
}

TEST_CASE("catalogue weights evaluate correctly") {
  const mpfr_prec_t prec = 256;
  WeightFunction e1 = make_exm1();
  // phi(0) = Gamma(6) = 120, phi(1) = Gamma(5)/e
  CHECK(rel_err(e1.eval(BigReal(0.0, prec), prec), BigReal(120.0, prec)) < 1e-70);
  BigReal want = BigReal(24.0, prec) / dofde::mp::exp(BigReal(1.0, prec));
  CHECK(rel_err(e1.eval(BigReal(1.0, prec), prec), want) < 1e-70);

  WeightFunction e2 = make_exm2();
  CHECK(rel_err(e2.eval(BigReal(1.0, prec), prec), BigReal(2.0, prec)) < 1e-70);
  CHECK(e2.alpha_max == 2);
}

TEST_CASE("bump weight is normalized and vanishes outside its support") {
  const mpfr_prec_t prec = 256;
  WeightFunction b = make_bump(2.0, 0.5, 2);
  CHECK(b.support_lo == doctest::Approx(1.5));
  CHECK(b.support_hi == doctest::Approx(2.0));
  CHECK(b.eval(BigReal(1.5, prec), prec).is_zero());
  CHECK(b.eval(BigReal(1.4, prec), prec).is_zero());
  CHECK(b.eval(BigReal(2.5, prec), prec).is_zero());
  CHECK(b.eval(BigReal(1.9, prec), prec).sign() > 0);

  auto f = [&](const BigReal& a) { return b.eval(a, prec); };
  BigReal mass = integrate_adaptive(std::function<BigReal(const BigReal&)>(f),
                                    BigReal(1.5, prec), BigReal(2.0, prec), BigReal(1e-20, prec),
                                    prec);
  CHECK(std::abs(mass.to_double() - 1.0) < 1e-10);

  // sharper bump, mass concentrated in a 1e-46 scale raw integral
  WeightFunction bs = make_bump(2.0, 0.1, 2);
  auto fs = [&](const BigReal& a) { return bs.eval(a, prec); };
  BigReal mass2 = integrate_adaptive(std::function<BigReal(const BigReal&)>(fs),
                                     BigReal(1.9, prec), BigReal(2.0, prec), BigReal(1e-20, prec),
                                     prec);
  CHECK(std::abs(mass2.to_double() - 1.0) < 1e-10);
}

TEST_CASE("split_sign separates discrete terms by coefficient sign") {
  WeightFunction w = make_multiterm({0.5, 1.5, 1.2}, {2.0, -3.0, 1.0});
  auto parts = split_sign(w);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].first == 1);
  CHECK(parts[0].second.orders == std::vector<double>{0.5, 1.2});
  CHECK(parts[0].second.coeffs == std::vector<double>{2.0, 1.0});
  CHECK(parts[1].first == -1);
  CHECK(parts[1].second.orders == std::vector<double>{1.5});
  CHECK(parts[1].second.coeffs == std::vector<double>{3.0});
  CHECK(parts[0].second.id != parts[1].second.id);

  WeightFunction pos = make_multiterm({0.5}, {1.0});
  auto single = split_sign(pos);
  REQUIRE(single.size() == 1);
  CHECK(single[0].first == 1);
  CHECK(single[0].second.id == pos.id);

  auto cont = split_sign(make_exm1());
  REQUIRE(cont.size() == 1);
  CHECK(cont[0].first == 1);
}

TEST_CASE("single-order kernel reproduces the power-law memory kernel") {
  const mpfr_prec_t prec = 256;
  DOKernel k = make_kernel(make_single_order(0.5), 1, prec);
  CHECK(kernel_is_discrete(k));
  CHECK(!kernel_is_zero(k));
  // K(t) = t^(-1/2) / Gamma(1/2)
  BigReal sqrt_pi = dofde::mp::sqrt(BigReal::pi(prec));
  BigReal got = eval_kernel(k, BigReal(1.0, prec));
  CHECK(rel_err(got, BigReal(1.0, prec) / sqrt_pi) < 1e-70);
  BigReal t(0.3, prec);
  got = eval_kernel(k, t);
  BigReal want = dofde::mp::pow(t, BigReal(-0.5, prec)) / sqrt_pi;
  CHECK(rel_err(got, want) < 1e-70);
  // Laplace transform: s^(alpha - 1) = s^(-1/2)
  BigReal s(2.0, prec);
  CHECK(rel_err(eval_laplace(k, s), dofde::mp::pow(s, BigReal(-0.5, prec))) < 1e-70);
}

TEST_CASE("distributed-order kernel values match independent integration") {
  const mpfr_prec_t prec = 256;
  WeightFunction e1 = make_exm1();
  DOKernel k1 = make_kernel(e1, 1, prec);
  k1.quad_abs_tol = 1e-32;
  DOKernel k2 = make_kernel(e1, 2, prec);
  k2.quad_abs_tol = 1e-32;

  CHECK(rel_err(eval_kernel(k1, BigReal(1.0, prec)),
                BigReal("31.15031217640019250233733278226045214424", prec)) < 1e-28);
  CHECK(rel_err(eval_kernel(k2, BigReal(1.0, prec)),
                BigReal("2.401694396425087805188192181401749325936", prec)) < 1e-28);
  CHECK(rel_err(eval_kernel(k2, BigReal("0.01", prec)),
                BigReal("11.46015946940846759749907665578823739112", prec)) < 1e-28);

  WeightFunction e2 = make_exm2();
  DOKernel q1 = make_kernel(e2, 1, prec);
  q1.quad_abs_tol = 1e-32;
  // at t = 1 the alpha-integral collapses to int_0^1 (3-a)(2-a)(1-a) da = 9/4
  CHECK(rel_err(eval_kernel(q1, BigReal(1.0, prec)), BigReal(2.25, prec)) < 1e-30);

  WeightFunction b = make_bump(2.0, 0.5, 2);
  DOKernel kb = make_kernel(b, 2, prec);
  kb.quad_abs_tol = 1e-32;
  CHECK(rel_err(eval_kernel(kb, BigReal(1.0, prec)),
                BigReal("0.1222254639074310812700532313881517445282", prec)) < 1e-28);
}

TEST_CASE("laplace transforms match independent integration") {
  const mpfr_prec_t prec = 256;
  DOKernel q1 = make_kernel(make_exm2(), 1, prec);
  q1.quad_abs_tol = 1e-32;
  CHECK(rel_err(eval_laplace(q1, BigReal(2.0, prec)),
                BigReal("2.39949103355818424777936282388695673178", prec)) < 1e-28);

  DOKernel k1 = make_kernel(make_exm1(), 1, prec);
  k1.quad_abs_tol = 1e-32;
  CHECK(rel_err(eval_laplace(k1, BigReal(3.0, prec)),
                BigReal("20.30551343906319035671632798600417810992", prec)) < 1e-28);

  BigComplex s(2.0, 5.0, prec);
  BigComplex got = eval_laplace(k1, s);
  CHECK(rel_err(got.re, BigReal("10.42360547005776913643526261531760697809", prec)) < 1e-26);
  CHECK(rel_err(got.im, BigReal("-8.576249221909338289522758993837550777726", prec)) < 1e-26);

  // real and complex paths agree on the positive axis
  BigComplex sr(3.0, 0.0, prec);
  BigComplex both = eval_laplace(k1, sr);
  CHECK(rel_err(both.re, eval_laplace(k1, BigReal(3.0, prec))) < 1e-28);
  CHECK(dofde::mp::abs(both.im).to_double() < 1e-28);
}

TEST_CASE("rule-discretized kernel agrees with the continuous one") {
  const mpfr_prec_t prec = 256;
  WeightFunction e1 = make_exm1();
  DOKernel cont = make_kernel(e1, 1, prec);
  cont.quad_abs_tol = 1e-40;
  DOKernel disc = discretize_kernel(e1, 1, 200, prec);
  CHECK(kernel_is_discrete(disc));
  CHECK(kernel_id(disc) == "exm1:i1:gl200");
  for (double t : {0.01, 0.3, 1.0, 2.0}) {
    BigReal a = eval_kernel(cont, BigReal(t, prec));
    BigReal b = eval_kernel(disc, BigReal(t, prec));
    CHECK(rel_err(a, b) < 1e-30);
  }
  BigReal s(4.0, prec);
  CHECK(rel_err(eval_laplace(cont, s), eval_laplace(disc, s)) < 1e-30);
}

TEST_CASE("kernel domain and zero-mass handling") {
  const mpfr_prec_t prec = 128;
  DOKernel k = make_kernel(make_exm1(), 1, prec);
  CHECK_THROWS_AS(eval_kernel(k, BigReal(0.0, prec)), std::domain_error);
  CHECK_THROWS_AS(eval_kernel(k, BigReal(-1.0, prec)), std::domain_error);
  CHECK_THROWS_AS(eval_laplace(k, BigReal(0.0, prec)), std::domain_error);
  CHECK_THROWS_AS(eval_laplace(k, BigComplex(-1.0, 2.0, prec)), std::domain_error);

  // bump supported on (1.5, 2): its interval-1 kernel is identically zero
  DOKernel z = make_kernel(make_bump(2.0, 0.5, 2), 1, prec);
  CHECK(kernel_is_zero(z));
  CHECK(eval_kernel(z, BigReal(1.0, prec)).is_zero());

  // single order 0.5 has no mass on interval 2 of a two-interval operator
  WeightFunction mt = make_multiterm({0.5, 1.5}, {1.0, 1.0});
  DOKernel m2 = make_kernel(mt, 2, prec);
  CHECK(!kernel_is_zero(m2));
  DOKernel m1 = make_kernel(mt, 1, prec);
  CHECK(!kernel_is_zero(m1));
  // and the 0.5 term only contributes to interval 1
  BigReal sqrt_pi = dofde::mp::sqrt(BigReal::pi(prec));
  CHECK(rel_err(eval_kernel(m1, BigReal(1.0, prec)), BigReal(1.0, prec) / sqrt_pi) < 1e-30);

  CHECK_THROWS_AS(make_kernel(mt, 3, prec), std::invalid_argument);
  CHECK_THROWS_AS(make_kernel(mt, 0, prec), std::invalid_argument);
  CHECK_THROWS_AS(discretize_kernel(mt, 1, 10, prec), std::invalid_argument);
}

TEST_CASE("kernel ids are stable") {
  const mpfr_prec_t prec = 128;
  CHECK(kernel_id(make_kernel(make_exm1(), 2, prec)) == "exm1:i2");
  CHECK(kernel_id(make_kernel(make_single_order(0.5), 1, prec)) == "rl:0.5:i1");
  CHECK(kernel_id(make_kernel(make_bump(2.0, 0.5, 2), 2, prec)) == "bump:2:0.5:2:i2");
}
