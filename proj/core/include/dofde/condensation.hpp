#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "dofde/tableau.hpp"

namespace dofde::rk {

// One fractional mode v' = -rate * v + weight * d/dt v^(deriv-1), attached to
// the derivative level `deriv` in 1..alpha_max.
struct ModeSpec {
  int deriv = 1;
  double weight = 0.0;
  double rate = 0.0;
};

// Everything about a step that depends only on (tableau, h, modes): the mode
// resolvents B = (I + rate*h*A)^-1, the powers of hA appearing in the affine
// stage maps, and the coupling matrix G of the condensed system.
struct CondensationOps {
  int s = 0;
  int alpha_max = 0;
  double h = 0.0;
  std::vector<ModeSpec> modes;
  std::vector<Eigen::MatrixXd> P;   // (hA)^l for l = 0..alpha_max+1
  std::vector<Eigen::MatrixXd> B;   // per mode, (I + rate*h*A)^-1
  std::vector<Eigen::MatrixXd> AB;  // per mode, A * B
  Eigen::MatrixXd G;                // sum_j h*w_j * AB_j * (hA)^(alpha_max-deriv_j+1)
};

CondensationOps condensation_operators(const ButcherTableau& tb, double h, int alpha_max,
                                       const std::vector<ModeSpec>& modes);

// Rebuilds only when h changes; uniform meshes hit the cached entry every
// step, graded meshes rebuild each step without accumulating memory.
class CondensationCache {
public:
  CondensationCache(ButcherTableau tb, int alpha_max, std::vector<ModeSpec> modes)
      : tb_(std::move(tb)), alpha_max_(alpha_max), modes_(std::move(modes)) {}

  const CondensationOps& get(double h) {
    if (!have_ || ops_.h != h) {
      ops_ = condensation_operators(tb_, h, alpha_max_, modes_);
      have_ = true;
    }
    return ops_;
  }

  const ButcherTableau& tableau() const { return tb_; }

private:
  ButcherTableau tb_;
  int alpha_max_;
  std::vector<ModeSpec> modes_;
  CondensationOps ops_;
  bool have_ = false;
};

// Solution, its time derivatives, and the fractional modes at one time level.
// Entries are nodal vectors; scalar problems use dimension 1.
struct ModeSystemState {
  std::vector<Eigen::VectorXd> deriv;  // v^(0) .. v^(alpha_max)
  std::vector<Eigen::VectorXd> modes;  // aligned with the ModeSpec list
  double t = 0.0;

  static ModeSystemState zeros(int alpha_max, int n_modes, int dim);
  int dim() const { return deriv.empty() ? 0 : static_cast<int>(deriv[0].size()); }
};

// Componentwise implicit constraint 0 = F(t, v^(0..alpha_max), mode sum) and
// its partial derivatives. `v` points at alpha_max+1 stage values.
struct ComponentResidual {
  std::function<double(double t, const double* v, double mode_sum)> value;
  std::function<void(double t, const double* v, double mode_sum, double* dv, double* dsum)>
      partials;
};

struct NewtonControls {
  double abs_tol = 1e-12;
  int max_iter = 50;
};

struct StepDiagnostics {
  int newton_iters = 0;         // worst component
  double final_residual = 0.0;  // worst component
  long unknowns = 0;            // s * dim: size of the condensed implicit problem
};

// Damped Newton on an assembled dense Jacobian. Throws NumericalError with the
// residual-norm history when max_iter or the 10-halving line search runs out.
Eigen::VectorXd newton_solve(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& jacobian, Eigen::VectorXd guess,
    double abs_tol = 1e-12, int max_iter = 50, int* iters_out = nullptr);

// Advances the state by one step of size ops.h: solves the condensed s-stage
// problem for the top-derivative stages only, then recovers every other stage
// by linear updates. `stage_guess` (s x dim) warm-starts Newton and receives
// the converged stages for the next step.
void condensed_step(ModeSystemState& st, const ButcherTableau& tb, const CondensationOps& ops,
                    const ComponentResidual& F, const NewtonControls& nc = {},
                    Eigen::MatrixXd* stage_guess = nullptr, StepDiagnostics* diag = nullptr);

}  // namespace dofde::rk
