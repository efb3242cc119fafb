#include "dofde/scenarios.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace dofde::scen {

namespace {

// g and g' of example1. |u| in place of u keeps transient Newton iterates
// with u < 0 inside the domain; on the solution path u >= 0 and the two
// coincide.
double g1(double u) {
  const double s = std::sqrt(std::abs(u));
  return std::cos(100.0 * u / (1.0 + s));
}

double dg1(double u) {
  const double s = std::sqrt(std::abs(u));
  const double th = 100.0 * u / (1.0 + s);
  return -std::sin(th) * 100.0 * (1.0 + 0.5 * s) / ((1.0 + s) * (1.0 + s));
}

}  // namespace

double example1_rhs(double t) {
  if (t <= 0.0) return 0.0;
  // 120 (t^5 - t^3 e^-2) / (1 + log t), rewritten around the removable
  // singularity at t = 1/e: with tau = 1 + log t the expression equals
  // 120 e^(3 tau - 5) expm1(2 tau) / tau.
  const double tau = 1.0 + std::log(t);
  const double ratio = tau == 0.0 ? 2.0 : std::expm1(2.0 * tau) / tau;
  return 120.0 * std::exp(3.0 * tau - 5.0) * ratio;
}

double example2_rhs(double t) {
  if (t <= 0.0) return 0.0;
  const double e = std::log(t);
  if (std::abs(e) >= 0.3) {
    return (6.0 * t * t * t + 6.0 * t - 4.0) / e + (6.0 - 10.0 * t) / (e * e) +
           (4.0 * t - 4.0) / (e * e * e);
  }
  // The three terms cancel pairwise at t = 1; the Taylor series in e = log t
  // has coefficients (6*3^(m+1) + 6)/(m+1)! - 10/(m+2)! + 4/(m+3)!.
  double sum = 0.0, en = 1.0;
  double f1 = 1.0, f2 = 2.0, f3 = 6.0;  // (m+1)!, (m+2)!, (m+3)!
  double p3 = 3.0;                      // 3^(m+1)
  for (int m = 0; m < 20; ++m) {
    sum += en * ((6.0 * p3 + 6.0) / f1 - 10.0 / f2 + 4.0 / f3);
    en *= e;
    p3 *= 3.0;
    f1 = f2;
    f2 = f3;
    f3 *= static_cast<double>(m + 4);
  }
  return sum;
}

solve::DofdeProblem example1() {
  solve::DofdeProblem p;
  p.weight = kernels::make_exm1();
  p.init = {0.0, 0.0};
  p.T = 1.0;
  p.f = [](double t, double u) {
    const double t5 = t * t * t * t * t;
    return example1_rhs(t) + g1(u) - g1(t5);
  };
  p.df_du = [](double, double u) { return dg1(u); };
  p.reference = [](double t) { return t * t * t * t * t; };
  return p;
}

solve::DofdeProblem example2() {
  solve::DofdeProblem p;
  p.weight = kernels::make_exm2();
  p.init = {4.0, 2.0};
  p.T = 1.0;
  p.f = [](double t, double) { return example2_rhs(t); };
  p.reference = [](double t) { return t * t * t + 2.0 * t + 4.0; };
  return p;
}

double laplacian_eigenvalue(const fd::GridSpec& g, int k) {
  const double dx = fd::grid_dx(g);
  const double one_d = (2.0 * std::cos(k * M_PI * dx) - 2.0) / (dx * dx);
  return g.dimension == 1 ? one_d : 2.0 * one_d;
}

solve::DopdeProblem table1(const fd::GridSpec& g, const solve::KernelControls& kc) {
  if (g.dimension != 2 || g.cells <= 4)
    throw std::invalid_argument("table1: needs a 2D grid with more than 4 cells per axis");
  solve::DopdeProblem p;
  p.grid = g;
  p.eps = 1.0;
  const int nd = fd::grid_ndof(g);
  p.u0 = Eigen::VectorXd::Zero(nd);
  p.v0 = Eigen::VectorXd::Zero(nd);
  p.table = solve::global_kernel_table(kernels::make_exm1(), kc, nd);

  const double mu = laplacian_eigenvalue(g, 4);
  auto E = [](double x, double y) {
    return std::sin(4.0 * M_PI * x) * std::sin(4.0 * M_PI * y);
  };
  p.f = [E, mu](double t, double x, double y) {
    const double t5 = t * t * t * t * t;
    return E(x, y) * (example1_rhs(t) - mu * t5);
  };
  p.reference = [E](double t, double x, double y) {
    const double t5 = t * t * t * t * t;
    return E(x, y) * t5;
  };
  return p;
}

solve::DopdeProblem dowave2d(const fd::GridSpec& g, const solve::KernelControls& kc,
                             double radius) {
  solve::DopdeProblem p;
  p.grid = g;
  p.eps = 1.0;
  const int nd = fd::grid_ndof(g);
  p.u0 = Eigen::VectorXd::Zero(nd);
  p.v0 = Eigen::VectorXd::Zero(nd);
  p.table = solve::global_kernel_table(kernels::make_bump(2.0, radius, 2), kc, nd);
  p.f = [](double t, double, double) {
    if (t <= 0.0 || t >= 0.1) return 0.0;
    return 100.0 * std::sin(20.0 * M_PI * t) * std::exp(-1.0 / (10.0 * t * (1.0 - 10.0 * t)));
  };
  return p;
}

namespace {

Eigen::VectorXd point_sources(const fd::GridSpec& g,
                              const std::vector<std::pair<double, double>>& centers) {
  return fd::grid_sample(g, [&](double x, double y) {
    double v = 0.0;
    for (const auto& c : centers)
      v += std::exp(-1000.0 * std::hypot(x - c.first, y - c.second));
    return v;
  });
}

}  // namespace

solve::DopdeProblem geometric_eta(const fd::GridSpec& g, const solve::KernelControls& kc) {
  if (g.dimension != 2)
    throw std::invalid_argument("geometric_eta: needs a 2D grid");
  solve::DopdeProblem p;
  p.grid = g;
  p.eps = 0.2;
  const int nd = fd::grid_ndof(g);

  std::vector<double> eta(static_cast<std::size_t>(nd));
  double x, y;
  for (int i = 0; i < nd; ++i) {
    fd::grid_coords(g, i, x, y);
    eta[static_cast<std::size_t>(i)] =
        y < 0.5 ? (x < 0.5 ? 0.5 : 1.17) : (x < 0.5 ? 1.83 : 2.5);
  }
  p.table = solve::spatial_kernel_table(eta, 0.3, 3, kc);

  p.u0 = point_sources(g, {{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}});
  p.v0 = Eigen::VectorXd::Zero(nd);
  p.w0 = Eigen::VectorXd::Zero(nd);
  return p;
}

solve::DopdeProblem randomfield_eta(const fd::GridSpec& g, const solve::KernelControls& kc,
                                    std::uint64_t seed) {
  if (g.dimension != 2)
    throw std::invalid_argument("randomfield_eta: needs a 2D grid");
  solve::DopdeProblem p;
  p.grid = g;
  p.eps = 0.2;
  const int nd = fd::grid_ndof(g);

  // Smooth field: a few random low-frequency plane waves. Raw uint64 draws
  // keep the field independent of the standard library's distributions.
  std::mt19937_64 rng(seed);
  auto u01 = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  struct Wave {
    double a, px, py, phase;
  };
  std::vector<Wave> waves(6);
  for (auto& w : waves) {
    w.a = 2.0 * u01() - 1.0;
    w.px = 1.0 + std::floor(4.0 * u01());
    w.py = 1.0 + std::floor(4.0 * u01());
    w.phase = 2.0 * M_PI * u01();
  }
  auto field = [&waves](double x, double y) {
    double v = 0.0;
    for (const auto& w : waves) v += w.a * std::sin(M_PI * (w.px * x + w.py * y) + w.phase);
    return v;
  };

  std::vector<double> raw(static_cast<std::size_t>(nd));
  double lo = 1e300, hi = -1e300;
  double x, y;
  for (int i = 0; i < nd; ++i) {
    fd::grid_coords(g, i, x, y);
    raw[static_cast<std::size_t>(i)] = field(x, y);
    lo = std::min(lo, raw[static_cast<std::size_t>(i)]);
    hi = std::max(hi, raw[static_cast<std::size_t>(i)]);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::vector<double> eta(static_cast<std::size_t>(nd));
  for (int i = 0; i < nd; ++i) {
    const double t = (raw[static_cast<std::size_t>(i)] - lo) / span;  // [0, 1]
    const int level = std::min(7, static_cast<int>(t * 8.0));
    eta[static_cast<std::size_t>(i)] = 0.625 + 0.25 * level;
  }
  p.table = solve::spatial_kernel_table(eta, 0.3, 3, kc);

  p.u0 = point_sources(g, {{0.3, 0.3}, {0.7, 0.7}});
  p.v0 = Eigen::VectorXd::Zero(nd);
  p.w0 = Eigen::VectorXd::Zero(nd);
  return p;
}

bool is_pde_scenario(const std::string& name) {
  return name == "table1" || name == "dowave2d" || name == "geometric_eta" ||
         name == "randomfield_eta";
}

bool is_ode_scenario(const std::string& name) {
  return name == "example1" || name == "example2";
}

double default_horizon(const std::string& name) {
  if (name == "dowave2d") return 2.0;
  if (name == "geometric_eta" || name == "randomfield_eta") return 3.0;
  return 1.0;
}

solve::DofdeProblem ode_scenario(const std::string& name) {
  if (name == "example1") return example1();
  if (name == "example2") return example2();
  throw std::invalid_argument("unknown ODE scenario: " + name);
}

solve::DopdeProblem pde_scenario(const std::string& name, const fd::GridSpec& g,
                                 const solve::KernelControls& kc, std::uint64_t seed,
                                 double radius) {
  if (name == "table1") return table1(g, kc);
  if (name == "dowave2d") return dowave2d(g, kc, radius);
  if (name == "geometric_eta") return geometric_eta(g, kc);
  if (name == "randomfield_eta") return randomfield_eta(g, kc, seed);
  throw std::invalid_argument("unknown PDE scenario: " + name);
}

}  // namespace dofde::scen
