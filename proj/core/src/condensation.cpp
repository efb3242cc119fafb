#include "dofde/condensation.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "dofde/errors.hpp"

namespace dofde::rk {

CondensationOps condensation_operators(const ButcherTableau& tb, double h, int alpha_max,
                                       const std::vector<ModeSpec>& modes) {
  if (!(h > 0.0)) throw std::invalid_argument("condensation_operators: h must be positive");
  if (alpha_max < 1) throw std::invalid_argument("condensation_operators: alpha_max must be >= 1");
  const int s = tb.stages();

  CondensationOps ops;
  ops.s = s;
  ops.alpha_max = alpha_max;
  ops.h = h;
  ops.modes = modes;

  ops.P.resize(static_cast<std::size_t>(alpha_max) + 2);
  ops.P[0] = Eigen::MatrixXd::Identity(s, s);
  const Eigen::MatrixXd hA = h * tb.A;
  for (int l = 1; l <= alpha_max + 1; ++l) ops.P[l] = ops.P[l - 1] * hA;

  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(s, s);
  ops.B.reserve(modes.size());
  ops.AB.reserve(modes.size());
  ops.G = Eigen::MatrixXd::Zero(s, s);
  for (const ModeSpec& m : modes) {
    if (m.deriv < 1 || m.deriv > alpha_max)
      throw std::invalid_argument("condensation_operators: mode derivative index out of range");
    if (!(m.rate >= 0.0))
      throw std::invalid_argument("condensation_operators: mode rate must be nonnegative");
    Eigen::MatrixXd M = id + (m.rate * h) * tb.A;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    Eigen::MatrixXd B = lu.solve(id);
    double resid = (B * M - id).cwiseAbs().maxCoeff();
    if (!std::isfinite(resid) || resid > 1e-10)
      throw NumericalError("condensation_operators: resolvent inverse failed (residual " +
                           std::to_string(resid) + ")");
    ops.B.push_back(B);
    ops.AB.push_back(tb.A * B);
    ops.G += (h * m.weight) * ops.AB.back() *
             ops.P[static_cast<std::size_t>(alpha_max - m.deriv + 1)];
  }
  return ops;
}

ModeSystemState ModeSystemState::zeros(int alpha_max, int n_modes, int dim) {
  ModeSystemState st;
  st.deriv.assign(static_cast<std::size_t>(alpha_max) + 1, Eigen::VectorXd::Zero(dim));
  st.modes.assign(static_cast<std::size_t>(n_modes), Eigen::VectorXd::Zero(dim));
  return st;
}

Eigen::VectorXd newton_solve(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& jacobian, Eigen::VectorXd guess,
    double abs_tol, int max_iter, int* iters_out) {
  std::vector<double> history;
  Eigen::VectorXd x = std::move(guess);
  Eigen::VectorXd r = residual(x);
  double rn = r.cwiseAbs().maxCoeff();
  history.push_back(rn);

  auto fail = [&](const char* why) {
    std::string msg = "newton_solve: ";
    msg += why;
    msg += "; residual history:";
    std::size_t first = history.size() > 12 ? history.size() - 12 : 0;
    for (std::size_t i = first; i < history.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), " %.3e", history[i]);
      msg += buf;
    }
    throw NumericalError(msg);
  };

  for (int it = 0; it < max_iter; ++it) {
    if (std::isfinite(rn) && rn <= abs_tol) {
      if (iters_out) *iters_out = it;
      return x;
    }
    Eigen::VectorXd delta = jacobian(x).partialPivLu().solve(-r);
    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 10; ++halving) {
      Eigen::VectorXd xt = x + scale * delta;
      Eigen::VectorXd rt = residual(xt);
      double rtn = rt.cwiseAbs().maxCoeff();
      if (std::isfinite(rtn) && (rtn <= rn * (1.0 + 1e-8) || rtn <= abs_tol)) {
        x = std::move(xt);
        r = std::move(rt);
        rn = rtn;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    history.push_back(rn);
    if (!accepted) fail("line search stalled");
  }
  if (std::isfinite(rn) && rn <= abs_tol) {
    if (iters_out) *iters_out = max_iter;
    return x;
  }
  fail("no convergence within max_iter");
  return x;  // unreachable
}

void condensed_step(ModeSystemState& st, const ButcherTableau& tb, const CondensationOps& ops,
                    const ComponentResidual& F, const NewtonControls& nc,
                    Eigen::MatrixXd* stage_guess, StepDiagnostics* diag) {
  const int s = ops.s;
  const int am = ops.alpha_max;
  const int d = st.dim();
  const double h = ops.h;
  if (static_cast<int>(st.deriv.size()) != am + 1)
    throw std::invalid_argument("condensed_step: state/operator alpha_max mismatch");
  if (st.modes.size() != ops.modes.size())
    throw std::invalid_argument("condensed_step: state/operator mode count mismatch");

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(s);

  // Affine stage maps: value V^(i) = O[i] + P[am-i+1] K, derivative
  // k^(i) = q[i] + P[am-i] K, with K the top-derivative stages (s x d).
  std::vector<Eigen::MatrixXd> O(static_cast<std::size_t>(am) + 1);
  std::vector<Eigen::MatrixXd> q(static_cast<std::size_t>(am) + 1);
  for (int i = 0; i <= am; ++i) {
    O[i] = ones * st.deriv[i].transpose();
    q[i] = Eigen::MatrixXd::Zero(s, d);
    for (int l = 1; l <= am - i; ++l) {
      Eigen::VectorXd col = ops.P[l] * ones;
      Eigen::VectorXd colk = ops.P[l - 1] * ones;
      O[i] += col * st.deriv[i + l].transpose();
      q[i] += colk * st.deriv[i + l].transpose();
    }
  }

  // Mode-sum offset: stage values of the modes at K = 0.
  Eigen::MatrixXd Soff = Eigen::MatrixXd::Zero(s, d);
  for (std::size_t j = 0; j < ops.modes.size(); ++j) {
    const ModeSpec& m = ops.modes[j];
    Soff += ones * st.modes[j].transpose();
    Soff -= (h * m.rate) * (ops.AB[j] * ones) * st.modes[j].transpose();
    Soff += (h * m.weight) * ops.AB[j] * q[m.deriv - 1];
  }

  Eigen::VectorXd tq(s);
  for (int i = 0; i < s; ++i) tq[i] = st.t + tb.c[i] * h;

  Eigen::MatrixXd K = (stage_guess && stage_guess->rows() == s && stage_guess->cols() == d)
                          ? *stage_guess
                          : Eigen::MatrixXd::Zero(s, d);

  int worst_iters = 0;
  double worst_resid = 0.0;
  std::vector<double> v(static_cast<std::size_t>(am) + 1);
  std::vector<double> dv(static_cast<std::size_t>(am) + 1);

  for (int c = 0; c < d; ++c) {
    auto resid = [&](const Eigen::VectorXd& kappa) {
      Eigen::VectorXd R(s);
      Eigen::VectorXd Gk = ops.G * kappa;
      for (int row = 0; row < s; ++row) {
        for (int i = 0; i <= am; ++i)
          v[i] = O[i](row, c) + ops.P[am - i + 1].row(row).dot(kappa);
        R[row] = F.value(tq[row], v.data(), Soff(row, c) + Gk[row]);
      }
      return R;
    };
    auto jac = [&](const Eigen::VectorXd& kappa) {
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(s, s);
      Eigen::VectorXd Gk = ops.G * kappa;
      for (int row = 0; row < s; ++row) {
        for (int i = 0; i <= am; ++i)
          v[i] = O[i](row, c) + ops.P[am - i + 1].row(row).dot(kappa);
        double dsum = 0.0;
        F.partials(tq[row], v.data(), Soff(row, c) + Gk[row], dv.data(), &dsum);
        for (int i = 0; i <= am; ++i) J.row(row) += dv[i] * ops.P[am - i + 1].row(row);
        J.row(row) += dsum * ops.G.row(row);
      }
      return J;
    };
    int iters = 0;
    Eigen::VectorXd kc = newton_solve(resid, jac, K.col(c), nc.abs_tol, nc.max_iter, &iters);
    double rn = resid(kc).cwiseAbs().maxCoeff();
    K.col(c) = kc;
    worst_iters = std::max(worst_iters, iters);
    worst_resid = std::max(worst_resid, rn);
  }

  // Linear recovery of every other stage family, then the b-weighted updates.
  std::vector<Eigen::MatrixXd> kd(static_cast<std::size_t>(am) + 1);
  kd[am] = K;
  for (int i = 0; i < am; ++i) kd[i] = q[i] + ops.P[am - i] * K;
  for (int i = 0; i <= am; ++i) st.deriv[i] += h * (kd[i].transpose() * tb.b);
  for (std::size_t j = 0; j < ops.modes.size(); ++j) {
    const ModeSpec& m = ops.modes[j];
    Eigen::MatrixXd km =
        ops.B[j] * ((-m.rate) * ones * st.modes[j].transpose() + m.weight * kd[m.deriv - 1]);
    st.modes[j] += h * (km.transpose() * tb.b);
  }
  st.t += h;

  if (stage_guess) *stage_guess = K;
  if (diag) {
    diag->newton_iters = worst_iters;
    diag->final_residual = worst_resid;
    diag->unknowns = static_cast<long>(s) * d;
  }
}

}  // namespace dofde::rk
