#include "dofde/pde_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "dofde/errors.hpp"

namespace dofde::solve {

namespace {

// Largest ndof still handled by the direct sparse factorization.
constexpr int kDirectLimit = 100000;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

SpatialKernelTable global_kernel_table(const kernels::WeightFunction& w,
                                       const KernelControls& kc, int ndof) {
  SpatialKernelTable tbl;
  tbl.alpha_max = w.alpha_max;
  tbl.values = {0.0};
  tbl.kernels.push_back(problem_kernels(w, kc));
  tbl.node_value.assign(static_cast<std::size_t>(ndof), 0);
  return tbl;
}

SpatialKernelTable spatial_kernel_table(const std::vector<double>& eta, double radius,
                                        int alpha_max, const KernelControls& kc) {
  std::set<double> distinct(eta.begin(), eta.end());
  if (distinct.empty()) throw ValidationError("spatial_kernel_table: empty eta field");
  if (distinct.size() > 16)
    throw ValidationError("spatial_kernel_table: " + std::to_string(distinct.size()) +
                          " distinct eta values, limit is 16");

  SpatialKernelTable tbl;
  tbl.alpha_max = alpha_max;
  tbl.values.assign(distinct.begin(), distinct.end());

  for (double v : tbl.values) {
    try {
      tbl.kernels.push_back(problem_kernels(kernels::make_bump(v, radius, alpha_max), kc));
    } catch (const std::exception& e) {
      throw ValidationError("spatial_kernel_table: eta value " + fmt(v) + ": " + e.what());
    }
  }

  // Unify the term count per kernel index; zero kernels get inert terms.
  for (int i = 0; i < alpha_max; ++i) {
    int m = 0;
    for (const auto& ks : tbl.kernels) m = std::max(m, ks[static_cast<std::size_t>(i)].m());
    for (auto& ks : tbl.kernels)
      ks[static_cast<std::size_t>(i)].terms.resize(static_cast<std::size_t>(m), {0.0, 0.0});
  }

  tbl.node_value.resize(eta.size());
  for (std::size_t i = 0; i < eta.size(); ++i) {
    auto it = std::lower_bound(tbl.values.begin(), tbl.values.end(), eta[i]);
    tbl.node_value[i] = static_cast<int>(it - tbl.values.begin());
  }
  return tbl;
}

PdeResult solve_dopde(const DopdeProblem& p, const PdeControls& pc) {
  const int nd = fd::grid_ndof(p.grid);
  const SpatialKernelTable& tbl = p.table;
  const int am = tbl.alpha_max;
  if (am < 1 || tbl.kernels.empty())
    throw std::invalid_argument("solve_dopde: empty kernel table");
  if (static_cast<int>(tbl.node_value.size()) != nd)
    throw std::invalid_argument("solve_dopde: kernel table sized for a different grid");

  const rk::ButcherTableau tb = rk::make_tableau(pc.scheme);
  const int s = tb.stages();
  const rk::TimeMesh mesh = rk::graded_mesh(pc.N, pc.gamma, pc.T);
  const Eigen::SparseMatrix<double> L = fd::assemble_laplacian(p.grid);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(s);

  // Aligned mode layout: interval i occupies rows moff[i-1] .. moff[i]-1.
  std::vector<int> moff(static_cast<std::size_t>(am) + 1, 0);
  for (int i = 1; i <= am; ++i) {
    moff[static_cast<std::size_t>(i)] =
        moff[static_cast<std::size_t>(i) - 1] + tbl.terms_per_interval(i);
    for (const auto& ks : tbl.kernels)
      if (ks[static_cast<std::size_t>(i) - 1].m() != tbl.terms_per_interval(i))
        throw std::invalid_argument("solve_dopde: kernel table term counts not aligned");
  }
  const int M = moff[static_cast<std::size_t>(am)];
  const int nv = static_cast<int>(tbl.values.size());

  std::vector<std::vector<rk::ModeSpec>> vmodes(static_cast<std::size_t>(nv));
  for (int v = 0; v < nv; ++v)
    for (int i = 1; i <= am; ++i)
      for (const auto& term : tbl.kernels[static_cast<std::size_t>(v)][static_cast<std::size_t>(i) - 1].terms)
        vmodes[static_cast<std::size_t>(v)].push_back({i, term.weight, term.rate});

  // State.
  std::vector<Eigen::VectorXd> deriv(static_cast<std::size_t>(am) + 1,
                                     Eigen::VectorXd::Zero(nd));
  auto init_field = [&](const Eigen::VectorXd& f, int level, const char* name) {
    if (f.size() == 0) return;
    if (f.size() != nd)
      throw std::invalid_argument(std::string("solve_dopde: ") + name + " has wrong size");
    deriv[static_cast<std::size_t>(level)] = f;
  };
  init_field(p.u0, 0, "u0");
  if (am >= 2) init_field(p.v0, 1, "v0");
  if (am >= 3) init_field(p.w0, 2, "w0");
  Eigen::MatrixXd modes = Eigen::MatrixXd::Zero(M, nd);

  PdeResult res;
  res.unknowns = static_cast<long>(s) * nd;
  res.t.reserve(static_cast<std::size_t>(pc.N) + 1);
  res.t.push_back(0.0);

  // Snapshot times snap to the nearest mesh node.
  std::vector<int> snap_at(pc.snapshot_times.size());
  for (std::size_t k = 0; k < pc.snapshot_times.size(); ++k) {
    int best = 0;
    for (int n = 1; n <= pc.N; ++n)
      if (std::abs(mesh.t[static_cast<std::size_t>(n)] - pc.snapshot_times[k]) <
          std::abs(mesh.t[static_cast<std::size_t>(best)] - pc.snapshot_times[k]))
        best = n;
    snap_at[k] = best;
  }
  for (std::size_t k = 0; k < snap_at.size(); ++k)
    if (snap_at[k] == 0) res.snapshots.emplace_back(0.0, deriv[0]);

  double linf = -1.0;
  auto record_error = [&](double t) {
    if (!p.reference) return;
    Eigen::VectorXd ref = fd::grid_sample(
        p.grid, [&](double x, double y) { return p.reference(t, x, y); });
    linf = std::max(linf, fd::grid_l2_norm(p.grid, deriv[0] - ref));
  };
  record_error(0.0);

  // Operators for the current step size.
  double cur_h = -1.0;
  std::vector<rk::CondensationOps> ops;
  Eigen::MatrixXd Ptop;                                  // (hA)^(am+1)
  std::vector<std::vector<Eigen::VectorXd>> abo;         // [v][j] AB_j * 1
  std::vector<std::vector<Eigen::MatrixXd>> hwAB;        // [v][j] h*w_j*AB_j
  std::vector<std::vector<double>> beta;                 // [v][j] b' B_j 1
  std::vector<std::vector<Eigen::RowVectorXd>> rrow;     // [v][j] w_j b' B_j
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>> bicg;
  Eigen::SparseMatrix<double> Mglob;
  const bool direct = nd <= kDirectLimit && !pc.force_iterative;

  auto rebuild = [&](double h) {
    ops.clear();
    abo.assign(static_cast<std::size_t>(nv), {});
    hwAB.assign(static_cast<std::size_t>(nv), {});
    beta.assign(static_cast<std::size_t>(nv), {});
    rrow.assign(static_cast<std::size_t>(nv), {});
    for (int v = 0; v < nv; ++v) {
      ops.push_back(rk::condensation_operators(tb, h, am, vmodes[static_cast<std::size_t>(v)]));
      const auto& o = ops.back();
      for (int j = 0; j < M; ++j) {
        const auto& mj = o.modes[static_cast<std::size_t>(j)];
        abo[static_cast<std::size_t>(v)].push_back(o.AB[static_cast<std::size_t>(j)] * ones);
        hwAB[static_cast<std::size_t>(v)].push_back((h * mj.weight) *
                                                    o.AB[static_cast<std::size_t>(j)]);
        Eigen::RowVectorXd btB = tb.b.transpose() * o.B[static_cast<std::size_t>(j)];
        beta[static_cast<std::size_t>(v)].push_back(btB.sum());
        rrow[static_cast<std::size_t>(v)].push_back(mj.weight * btB);
      }
    }
    Ptop = ops[0].P[static_cast<std::size_t>(am) + 1];

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(nd) * s * s +
                 static_cast<std::size_t>(L.nonZeros()) * s * s);
    for (int x = 0; x < nd; ++x) {
      const Eigen::MatrixXd& G = ops[static_cast<std::size_t>(tbl.node_value[static_cast<std::size_t>(x)])].G;
      for (int r = 0; r < s; ++r)
        for (int c = 0; c < s; ++c) trip.emplace_back(x * s + r, x * s + c, G(r, c));
    }
    for (int col = 0; col < L.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(L, col); it; ++it)
        for (int r = 0; r < s; ++r)
          for (int c = 0; c < s; ++c)
            trip.emplace_back(static_cast<int>(it.row()) * s + r,
                              static_cast<int>(it.col()) * s + c,
                              -p.eps * it.value() * Ptop(r, c));
    Mglob.resize(static_cast<long>(nd) * s, static_cast<long>(nd) * s);
    Mglob.setFromTriplets(trip.begin(), trip.end());
    Mglob.makeCompressed();

    if (direct) {
      lu.compute(Mglob);
      if (lu.info() != Eigen::Success)
        throw NumericalError("solve_dopde: sparse factorization failed");
    } else {
      bicg.setTolerance(pc.lin_tol);
      bicg.setMaxIterations(pc.lin_maxit);
      bicg.compute(Mglob);
    }
  };

  std::vector<Eigen::MatrixXd> q(static_cast<std::size_t>(am));  // stage derivative offsets
  double step_time = 0.0;

  for (int n = 0; n < pc.N; ++n) {
    const double h = mesh.step(n);
    const double tn = mesh.t[static_cast<std::size_t>(n)];
    if (h != cur_h) {
      rebuild(h);
      cur_h = h;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto& P = ops[0].P;

    Eigen::MatrixXd O0 = ones * deriv[0].transpose();
    for (int l = 1; l <= am; ++l)
      O0 += (P[static_cast<std::size_t>(l)] * ones) * deriv[static_cast<std::size_t>(l)].transpose();
    for (int i = 0; i < am; ++i) {
      q[static_cast<std::size_t>(i)] = Eigen::MatrixXd::Zero(s, nd);
      for (int l = 1; l <= am - i; ++l)
        q[static_cast<std::size_t>(i)] += (P[static_cast<std::size_t>(l) - 1] * ones) *
                                          deriv[static_cast<std::size_t>(i + l)].transpose();
    }

    // Stage residual offsets and the forcing, assembled as the rhs of the
    // condensed linear system (G - eps*L x Ptop) K = rhs.
    Eigen::MatrixXd R(s, nd);
    if (p.f) {
      double x, y;
      for (int xn = 0; xn < nd; ++xn) {
        fd::grid_coords(p.grid, xn, x, y);
        for (int r = 0; r < s; ++r) R(r, xn) = p.f(tn + tb.c[r] * h, x, y);
      }
    } else {
      R.setZero();
    }
    for (int xn = 0; xn < nd; ++xn) {
      const int v = tbl.node_value[static_cast<std::size_t>(xn)];
      const auto& mods = vmodes[static_cast<std::size_t>(v)];
      for (int j = 0; j < M; ++j) {
        const rk::ModeSpec& mj = mods[static_cast<std::size_t>(j)];
        const double mv = modes(j, xn);
        R.col(xn) -= mv * ones - (h * mj.rate * mv) * abo[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)];
        R.col(xn) -= hwAB[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)] *
                     q[static_cast<std::size_t>(mj.deriv) - 1].col(xn);
      }
    }
    R += p.eps * (O0 * L);

    Eigen::Map<Eigen::VectorXd> rhs(R.data(), static_cast<long>(s) * nd);
    Eigen::VectorXd kvec;
    if (direct) {
      kvec = lu.solve(rhs);
      const double rel = (Mglob * kvec - rhs).cwiseAbs().maxCoeff() /
                         (rhs.cwiseAbs().maxCoeff() + 1.0);
      if (!std::isfinite(rel) || rel > 1e-9)
        throw NumericalError("solve_dopde: direct solve residual " + fmt(rel) + " at step " +
                             std::to_string(n + 1));
    } else {
      kvec = bicg.solve(rhs);
      if (bicg.info() != Eigen::Success || !(bicg.error() <= pc.lin_tol))
        throw AccuracyError("solve_dopde: linear tolerance " + fmt(pc.lin_tol) +
                            " not reached after " + std::to_string(bicg.iterations()) +
                            " iterations (error " + fmt(bicg.error()) + ") at step " +
                            std::to_string(n + 1));
    }
    Eigen::Map<Eigen::MatrixXd> K(kvec.data(), s, nd);

    // Recovery: remaining stage derivatives, then the b-weighted updates.
    for (int i = 0; i < am; ++i)
      q[static_cast<std::size_t>(i)] += P[static_cast<std::size_t>(am - i)] * K;
    for (int i = 0; i < am; ++i)
      deriv[static_cast<std::size_t>(i)] += h * (q[static_cast<std::size_t>(i)].transpose() * tb.b);
    deriv[static_cast<std::size_t>(am)] += h * (K.transpose() * tb.b);

    for (int xn = 0; xn < nd; ++xn) {
      const int v = tbl.node_value[static_cast<std::size_t>(xn)];
      const auto& mods = vmodes[static_cast<std::size_t>(v)];
      for (int j = 0; j < M; ++j) {
        const rk::ModeSpec& mj = mods[static_cast<std::size_t>(j)];
        const Eigen::VectorXd kd = q[static_cast<std::size_t>(mj.deriv) - 1].col(xn);
        const double old = modes(j, xn);
        if (pc.check_recurrence) {
          const auto& o = ops[static_cast<std::size_t>(v)];
          Eigen::VectorXd km = o.B[static_cast<std::size_t>(j)] *
                               (-mj.rate * old * ones + mj.weight * kd);
          Eigen::VectorXd resid = km + mj.rate * (old * ones + h * tb.A * km) - mj.weight * kd;
          const double scale = 1.0 + km.cwiseAbs().maxCoeff() + std::abs(mj.rate * old) +
                               std::abs(mj.weight) * kd.cwiseAbs().maxCoeff();
          res.max_recurrence_residual =
              std::max(res.max_recurrence_residual, resid.cwiseAbs().maxCoeff() / scale);
        }
        modes(j, xn) += h * (-mj.rate * beta[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)] * old +
                             rrow[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)].dot(kd));
      }
    }

    step_time += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double tn1 = mesh.t[static_cast<std::size_t>(n) + 1];
    res.t.push_back(tn1);
    record_error(tn1);
    for (std::size_t k = 0; k < snap_at.size(); ++k)
      if (snap_at[k] == n + 1) res.snapshots.emplace_back(tn1, deriv[0]);
  }

  res.u = deriv[0];
  res.linf_l2_error = p.reference ? linf : -1.0;
  res.step_seconds = step_time / pc.N;
  return res;
}

}  // namespace dofde::solve
