#pragma once

#include <Eigen/Dense>
#include <string>

namespace dofde::rk {

enum class Scheme {
  implicit_euler,
  radau_iia_1,  // same tableau as implicit_euler
  radau_iia_2,
  radau_iia_3,
  sdirk2,
};

struct ButcherTableau {
  std::string name;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  int order = 0;
  bool l_stable = false;
  bool stiffly_accurate = false;
  bool dirk = false;

  int stages() const { return static_cast<int>(b.size()); }

  // Stability function R(z) = 1 + z b^T (I - z A)^{-1} 1.
  double stability(double z) const;
};

ButcherTableau make_tableau(Scheme scheme);

// Accepts the scheme names used by configs and the CLI.
Scheme scheme_from_string(const std::string& name);
std::string to_string(Scheme scheme);

}  // namespace dofde::rk
