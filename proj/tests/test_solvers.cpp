#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <cmath>
#include <cstdlib>
#include <set>
#include <vector>

#include "doctest.h"
#include "dofde/errors.hpp"
#include "dofde/laplacian.hpp"
#include "dofde/ode_solver.hpp"
#include "dofde/pde_solver.hpp"
#include "dofde/scenarios.hpp"

using namespace dofde;

namespace {

std::string cache_dir() {
  const char* d = std::getenv("DOFDE_CACHE_DIR");
  return d ? d : "kernel-cache";
}

solve::KernelControls controls(double tol, int fixed = 0, bool certify = false) {
  solve::KernelControls kc;
  kc.tol = tol;
  kc.fixed_terms = fixed;
  kc.certify = certify;
  kc.cache_dir = cache_dir();
  return kc;
}

}  // namespace

TEST_CASE("1d laplacian stencil, two interior nodes") {
  fd::GridSpec g{1, 3};
  CHECK(fd::grid_ndof(g) == 2);
  Eigen::MatrixXd L = Eigen::MatrixXd(fd::assemble_laplacian(g));
  Eigen::MatrixXd want(2, 2);
  want << -18.0, 9.0, 9.0, -18.0;
  CHECK((L - want).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("laplacian is symmetric and negative definite") {
  fd::GridSpec g{2, 8};
  Eigen::SparseMatrix<double> L = fd::assemble_laplacian(g);
  Eigen::MatrixXd D(L);
  CHECK((D - D.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
  CHECK(es.eigenvalues().maxCoeff() < 0.0);
}

TEST_CASE("sin(4 pi x) sin(4 pi y) is a discrete eigenvector") {
  fd::GridSpec g{2, 16};
  Eigen::SparseMatrix<double> L = fd::assemble_laplacian(g);
  Eigen::VectorXd E = fd::grid_sample(g, [](double x, double y) {
    return std::sin(4.0 * M_PI * x) * std::sin(4.0 * M_PI * y);
  });
  const double mu = scen::laplacian_eigenvalue(g, 4);
  CHECK(mu < 0.0);
  Eigen::VectorXd r = L * E - mu * E;
  CHECK(r.cwiseAbs().maxCoeff() / (std::abs(mu) * E.cwiseAbs().maxCoeff()) < 1e-12);
}

TEST_CASE("grid l2 norm of the constant field") {
  fd::GridSpec g{2, 10};
  Eigen::VectorXd one = Eigen::VectorXd::Ones(fd::grid_ndof(g));
  CHECK(fd::grid_l2_norm(g, one) == doctest::Approx(9.0 / 10.0).epsilon(1e-14));
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(fd::grid_ndof({3, 8}), std::invalid_argument);
  CHECK_THROWS_AS(fd::grid_ndof({2, 1}), std::invalid_argument);
}

TEST_CASE("steady solve converges at second order") {
  auto err = [](int cells) {
    fd::GridSpec g{2, cells};
    Eigen::SparseMatrix<double> L = fd::assemble_laplacian(g);
    Eigen::VectorXd f = fd::grid_sample(g, [](double x, double y) {
      return -2.0 * M_PI * M_PI * std::sin(M_PI * x) * std::sin(M_PI * y);
    });
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(L);
    REQUIRE(lu.info() == Eigen::Success);
    Eigen::VectorXd u = lu.solve(f);
    Eigen::VectorXd ex = fd::grid_sample(g, [](double x, double y) {
      return std::sin(M_PI * x) * std::sin(M_PI * y);
    });
    return fd::grid_l2_norm(g, u - ex);
  };
  const double e1 = err(8), e2 = err(16), e3 = err(32);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(std::log2(e2 / e3) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("example1 forcing: closed form and singularity") {
  CHECK(scen::example1_rhs(0.5) == doctest::Approx(5.605197809781946418).epsilon(1e-14));
  CHECK(scen::example1_rhs(0.25) == doctest::Approx(0.35352873304372159531).epsilon(1e-14));
  CHECK(scen::example1_rhs(0.0) == 0.0);
  // removable singularity at t = 1/e
  const double te = std::exp(-1.0);
  const double lim = 240.0 * std::exp(-5.0);
  CHECK(scen::example1_rhs(te) == doctest::Approx(lim).epsilon(1e-13));
  CHECK(scen::example1_rhs(te * (1.0 + 1e-12)) == doctest::Approx(lim).epsilon(1e-10));
  CHECK(scen::example1_rhs(te * (1.0 - 1e-12)) == doctest::Approx(lim).epsilon(1e-10));
}

TEST_CASE("example2 forcing: closed form, series window, singularity at t=1") {
  CHECK(scen::example2_rhs(0.5) == doctest::Approx(8.4476041555416595367).epsilon(1e-13));
  CHECK(scen::example2_rhs(0.9) == doctest::Approx(16.948000736751895197).epsilon(1e-13));
  CHECK(scen::example2_rhs(0.75) == doctest::Approx(13.339901048716536985).epsilon(1e-13));
  CHECK(scen::example2_rhs(1.0) == doctest::Approx(59.0 / 3.0).epsilon(1e-14));
  CHECK(scen::example2_rhs(0.0) == 0.0);
  // continuity across the series/direct switch at |log t| = 0.3
  const double ta = std::exp(-0.3 - 1e-9), tb = std::exp(-0.3 + 1e-9);
  CHECK(scen::example2_rhs(ta) == doctest::Approx(scen::example2_rhs(tb)).epsilon(1e-8));
}

TEST_CASE("zero data, zero forcing: trajectory stays exactly zero") {
  solve::DofdeProblem p;
  p.weight = kernels::make_exm1();
  p.init = {0.0, 0.0};
  p.T = 1.0;
  p.f = [](double, double) { return 0.0; };
  auto res = solve::solve_dofde(p, controls(1e-6), {rk::Scheme::radau_iia_2, 8});
  for (double u : res.u) CHECK(u == 0.0);
  CHECK(res.unknowns == 2);
}

TEST_CASE("example2: graded solve reproduces u(1) = 7") {
  auto p = scen::example2();
  solve::SolveControls sc;
  sc.scheme = rk::Scheme::radau_iia_2;
  sc.N = 64;
  sc.gamma = 3.0;
  auto res = solve::solve_dofde(p, controls(1e-20), sc);
  CHECK(res.u.back() == doctest::Approx(7.0).epsilon(1e-5));
  CHECK(res.linf_error < 1e-4);
  CHECK(res.kernels.size() == 2);
}

TEST_CASE("example2: graded-mesh rates follow the grading") {
  auto p = scen::example2();
  auto rate = [&](rk::Scheme s, double gamma, std::vector<int> Ns) {
    std::vector<double> errs;
    for (int N : Ns) {
      solve::SolveControls sc;
      sc.scheme = s;
      sc.N = N;
      sc.gamma = gamma;
      errs.push_back(solve::solve_dofde(p, controls(1e-20), sc).linf_error);
    }
    std::vector<double> r;
    for (std::size_t i = 1; i < errs.size(); ++i) r.push_back(std::log2(errs[i - 1] / errs[i]));
    return r;
  };

  // gamma = 1: first order regardless of the scheme
  auto r1 = rate(rk::Scheme::radau_iia_2, 1.0, {40, 80, 160});
  CHECK(r1.back() == doctest::Approx(1.0).epsilon(0.3));
  // gamma = order: full order (Radau IIA 2 has order 3)
  auto r3 = rate(rk::Scheme::radau_iia_2, 3.0, {40, 80, 160});
  CHECK(r3.back() == doctest::Approx(3.0).epsilon(0.11));
}

TEST_CASE("example1: discrete GL-200 kernel cross-validates the adaptive kernel") {
  auto p = scen::example1();
  solve::SolveControls sc;
  sc.scheme = rk::Scheme::radau_iia_2;
  sc.N = 320;

  auto ra = solve::solve_dofde(p, controls(1e-13, 0, true), sc);
  auto kc = controls(1e-13, 0, true);
  kc.gl_nodes = 200;
  auto rb = solve::solve_dofde(p, kc, sc);

  double l1 = 0.0;
  for (const auto& ck : ra.kernels) l1 += ck.l1_error;
  for (const auto& ck : rb.kernels) l1 += ck.l1_error;
  REQUIRE(l1 > 0.0);
  double dmax = 0.0;
  for (std::size_t i = 0; i < ra.u.size(); ++i)
    dmax = std::max(dmax, std::abs(ra.u[i] - rb.u[i]));
  CHECK(dmax <= 10.0 * l1);
}

TEST_CASE("spatial kernel table: constant field and quadrant partition") {
  std::vector<double> flat(25, 0.7);
  auto t1 = solve::spatial_kernel_table(flat, 0.3, 3, controls(1e-13, 6));
  CHECK(t1.values.size() == 1);
  for (int v : t1.node_value) CHECK(v == 0);

  fd::GridSpec g{2, 12};
  auto p = scen::geometric_eta(g, controls(1e-13, 6));
  CHECK(p.table.values.size() == 4);
  std::vector<int> counts(4, 0);
  for (int v : p.table.node_value) ++counts[static_cast<std::size_t>(v)];
  int total = 0;
  for (int c : counts) {
    CHECK(c > 0);
    total += c;
  }
  CHECK(total == fd::grid_ndof(g));
  // aligned term counts per kernel index across values
  for (int i = 1; i <= 3; ++i)
    for (const auto& ks : p.table.kernels)
      CHECK(ks[static_cast<std::size_t>(i) - 1].m() == p.table.terms_per_interval(i));
}

TEST_CASE("bump weights are normalized to unit mass") {
  for (double c : {0.5, 1.17, 2.5}) {
    auto w = kernels::make_bump(c, 0.3, 3);
    // Simpson rule on the support; the integrand is smooth and compact.
    const double lo = std::max(0.0, c - 0.3), hi = std::min(3.0, c + 0.3);
    const int n = 2000;
    const double dh = (hi - lo) / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double a = lo + i * dh;
      const double f = w.eval(mp::BigReal(a, 128), 128).to_double();
      s += f * ((i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    s *= dh / 3.0;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("pde: zero data and zero forcing stay exactly zero") {
  fd::GridSpec g{2, 8};
  auto p = scen::dowave2d(g, controls(1e-13, 4));
  p.f = nullptr;
  solve::PdeControls pc;
  pc.scheme = rk::Scheme::radau_iia_2;
  pc.N = 4;
  pc.T = 1.0;
  auto res = solve::solve_dopde(p, pc);
  CHECK(res.u.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pde: manufactured temporal rates on a fixed grid") {
  fd::GridSpec g{2, 16};
  auto p = scen::table1(g, controls(1e-30));
  auto err = [&](rk::Scheme s, int N) {
    solve::PdeControls pc;
    pc.scheme = s;
    pc.N = N;
    pc.T = 1.0;
    return solve::solve_dopde(p, pc).linf_l2_error;
  };
  const double r2a = std::log2(err(rk::Scheme::radau_iia_2, 8) / err(rk::Scheme::radau_iia_2, 16));
  const double r2b = std::log2(err(rk::Scheme::radau_iia_2, 16) / err(rk::Scheme::radau_iia_2, 32));
  CHECK(r2b == doctest::Approx(3.0).epsilon(0.15));
  CHECK(r2a > 2.0);
  const double r1 = std::log2(err(rk::Scheme::implicit_euler, 32) / err(rk::Scheme::implicit_euler, 64));
  CHECK(r1 == doctest::Approx(1.0).epsilon(0.3));
}

TEST_CASE("pde: unknown count is s * ndof regardless of m") {
  fd::GridSpec g{2, 8};
  const int nd = fd::grid_ndof(g);
  std::set<long> seen;
  for (int m : {10, 20}) {
    auto p = scen::table1(g, controls(1e-13, m));
    solve::PdeControls pc;
    pc.scheme = rk::Scheme::radau_iia_2;
    pc.N = 2;
    pc.T = 1.0;
    auto res = solve::solve_dopde(p, pc);
    CHECK(res.unknowns == 2L * nd);
    seen.insert(res.unknowns);
  }
  CHECK(seen.size() == 1);
}

TEST_CASE("pde: mode recurrences hold after condensation") {
  fd::GridSpec g{2, 12};
  auto p = scen::geometric_eta(g, controls(1e-13, 10));
  solve::PdeControls pc;
  pc.scheme = rk::Scheme::radau_iia_2;
  pc.N = 10;
  pc.T = 0.5;
  pc.check_recurrence = true;
  auto res = solve::solve_dopde(p, pc);
  CHECK(res.max_recurrence_residual <= 1e-12);
  CHECK(res.u.cwiseAbs().maxCoeff() > 0.0);
  CHECK(std::isfinite(res.u.cwiseAbs().maxCoeff()));
}

TEST_CASE("pde: direct and iterative linear branches agree") {
  fd::GridSpec g{2, 8};
  auto p = scen::table1(g, controls(1e-13, 8));
  solve::PdeControls pc;
  pc.scheme = rk::Scheme::sdirk2;
  pc.N = 4;
  pc.T = 1.0;
  auto rd = solve::solve_dopde(p, pc);
  pc.force_iterative = true;
  auto ri = solve::solve_dopde(p, pc);
  CHECK((rd.u - ri.u).cwiseAbs().maxCoeff() < 1e-8 * (1.0 + rd.u.cwiseAbs().maxCoeff()));
}

TEST_CASE("pde: snapshots land on mesh nodes") {
  fd::GridSpec g{2, 8};
  auto p = scen::dowave2d(g, controls(1e-13, 4));
  solve::PdeControls pc;
  pc.scheme = rk::Scheme::implicit_euler;
  pc.N = 10;
  pc.T = 2.0;
  pc.snapshot_times = {0.0, 1.0, 2.0};
  auto res = solve::solve_dopde(p, pc);
  REQUIRE(res.snapshots.size() == 3);
  CHECK(res.snapshots[0].first == 0.0);
  CHECK(res.snapshots[1].first == doctest::Approx(1.0));
  CHECK(res.snapshots[2].first == doctest::Approx(2.0));
  for (const auto& s : res.snapshots) CHECK(std::isfinite(s.second.cwiseAbs().maxCoeff()));
}
