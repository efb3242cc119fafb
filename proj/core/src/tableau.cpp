#include "dofde/tableau.hpp"

#include <cmath>
#include <stdexcept>

namespace dofde::rk {

namespace {

ButcherTableau backward_euler(const std::string& name) {
  ButcherTableau t;
  t.name = name;
  t.A = Eigen::MatrixXd::Constant(1, 1, 1.0);
  t.b = Eigen::VectorXd::Constant(1, 1.0);
  t.c = Eigen::VectorXd::Constant(1, 1.0);
  t.order = 1;
  t.l_stable = true;
  t.stiffly_accurate = true;
  t.dirk = true;
  return t;
}

}  // namespace

double ButcherTableau::stability(double z) const {
  const int s = stages();
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(s, s) - z * A;
  Eigen::VectorXd w = M.partialPivLu().solve(Eigen::VectorXd::Ones(s));
  return 1.0 + z * b.dot(w);
}

ButcherTableau make_tableau(Scheme scheme) {
  switch (scheme) {
    case Scheme::implicit_euler:
      return backward_euler("implicit_euler");
    case Scheme::radau_iia_1:
      return backward_euler("radau_iia_1");
    case Scheme::radau_iia_2: {
      ButcherTableau t;
      t.name = "radau_iia_2";
      t.A.resize(2, 2);
      t.A << 5.0 / 12.0, -1.0 / 12.0, 3.0 / 4.0, 1.0 / 4.0;
      t.b.resize(2);
      t.b << 3.0 / 4.0, 1.0 / 4.0;
      t.c.resize(2);
      t.c << 1.0 / 3.0, 1.0;
      t.order = 3;
      t.l_stable = true;
      t.stiffly_accurate = true;
      t.dirk = false;
      return t;
    }
    case Scheme::radau_iia_3: {
      const double r = std::sqrt(6.0);
      ButcherTableau t;
      t.name = "radau_iia_3";
      t.A.resize(3, 3);
      t.A << (88.0 - 7.0 * r) / 360.0, (296.0 - 169.0 * r) / 1800.0, (-2.0 + 3.0 * r) / 225.0,
          (296.0 + 169.0 * r) / 1800.0, (88.0 + 7.0 * r) / 360.0, (-2.0 - 3.0 * r) / 225.0,
          (16.0 - r) / 36.0, (16.0 + r) / 36.0, 1.0 / 9.0;
      t.b.resize(3);
      t.b << (16.0 - r) / 36.0, (16.0 + r) / 36.0, 1.0 / 9.0;
      t.c.resize(3);
      t.c << (4.0 - r) / 10.0, (4.0 + r) / 10.0, 1.0;
      t.order = 5;
      t.l_stable = true;
      t.stiffly_accurate = true;
      t.dirk = false;
      return t;
    }
    case Scheme::sdirk2: {
      // Alexander's two-stage L-stable SDIRK, diagonal 1 - 1/sqrt(2).
      const double g = 1.0 - 1.0 / std::sqrt(2.0);
      ButcherTableau t;
      t.name = "sdirk2";
      t.A.resize(2, 2);
      t.A << g, 0.0, 1.0 - g, g;
      t.b.resize(2);
      t.b << 1.0 - g, g;
      t.c.resize(2);
      t.c << g, 1.0;
      t.order = 2;
      t.l_stable = true;
      t.stiffly_accurate = true;
      t.dirk = true;
      return t;
    }
  }
  throw std::invalid_argument("make_tableau: unknown scheme");
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "implicit_euler" || name == "ie") return Scheme::implicit_euler;
  if (name == "radau_iia_1" || name == "riia1") return Scheme::radau_iia_1;
  if (name == "radau_iia_2" || name == "riia2") return Scheme::radau_iia_2;
  if (name == "radau_iia_3" || name == "riia3") return Scheme::radau_iia_3;
  if (name == "sdirk2") return Scheme::sdirk2;
  throw std::invalid_argument("unknown tableau name: " + name);
}

std::string to_string(Scheme scheme) { return make_tableau(scheme).name; }

}  // namespace dofde::rk
