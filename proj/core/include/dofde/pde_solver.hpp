#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <utility>
#include <vector>

#include "dofde/laplacian.hpp"
#include "dofde/ode_solver.hpp"

namespace dofde::solve {

// Per-node kernel data for the diffusion-wave stepper. Space dependence
// enters through a small set of weight-function variants ("values"); each
// node points at one of them. All values share the term count per kernel
// index, zero kernels are padded with inert (0, 0) terms to keep the nodal
// mode layout uniform.
struct SpatialKernelTable {
  int alpha_max = 0;
  std::vector<double> values;  // distinct eta values; single entry when global
  // kernels[v][i-1]: interval-i kernel for value v
  std::vector<std::vector<expsum::CompressedKernel>> kernels;
  std::vector<int> node_value;  // ndof -> index into values

  int terms_per_interval(int interval) const {
    return kernels.empty() ? 0 : kernels[0][static_cast<std::size_t>(interval) - 1].m();
  }
  int total_terms() const {
    int t = 0;
    for (int i = 1; i <= alpha_max; ++i) t += terms_per_interval(i);
    return t;
  }
};

// Space-independent weight: a one-entry table, no padding.
SpatialKernelTable global_kernel_table(const kernels::WeightFunction& w,
                                       const KernelControls& kc, int ndof);

// One bump weight bump(eta, radius) per distinct value of the nodal field
// `eta`; at most 16 distinct values. Term counts are unified per kernel index
// by padding. A compression failure aborts naming the offending value.
SpatialKernelTable spatial_kernel_table(const std::vector<double>& eta, double radius,
                                        int alpha_max, const KernelControls& kc);

// Distributed-order diffusion-wave problem
//   integral phi(a,x) D^a u da = eps * Laplace(u) + f(t, x)
// on (0,1)^d with homogeneous Dirichlet boundary.
struct DopdeProblem {
  fd::GridSpec grid;
  double eps = 1.0;
  std::function<double(double, double, double)> f;  // f(t, x, y)
  Eigen::VectorXd u0, v0;  // initial solution and first derivative
  Eigen::VectorXd w0;      // initial second derivative; required when alpha_max == 3
  SpatialKernelTable table;
  std::function<double(double, double, double)> reference;  // u(t, x, y); may be empty
};

struct PdeControls {
  rk::Scheme scheme = rk::Scheme::radau_iia_2;
  int N = 100;
  double gamma = 1.0;
  double T = 1.0;
  double lin_tol = 1e-12;  // iterative branch only
  int lin_maxit = 5000;
  bool force_iterative = false;  // direct solver below the dof threshold otherwise
  bool check_recurrence = false;
  std::vector<double> snapshot_times;  // snap to the nearest mesh node
};

struct PdeResult {
  std::vector<double> t;
  Eigen::VectorXd u;                // final field
  double linf_l2_error = -1.0;      // max over time of the L2 grid-norm error
  long unknowns = 0;                // stages * ndof
  double max_recurrence_residual = 0.0;
  double step_seconds = 0.0;        // mean wall time per step, setup excluded
  std::vector<std::pair<double, Eigen::VectorXd>> snapshots;
};

PdeResult solve_dopde(const DopdeProblem& p, const PdeControls& pc);

}  // namespace dofde::solve
