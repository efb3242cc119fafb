#include "dofde/ode_solver.hpp"

#include <cmath>
#include <stdexcept>

#include "dofde/errors.hpp"
#include "dofde/kernels.hpp"

namespace dofde::solve {

using kernels::DOKernel;

std::vector<expsum::CompressedKernel> problem_kernels(const kernels::WeightFunction& w,
                                                      const KernelControls& kc) {
  expsum::CompressOptions opt;
  opt.tol = kc.tol;
  opt.fixed_terms = kc.fixed_terms;
  opt.precision = kc.precision;
  opt.certify = kc.certify;

  std::vector<expsum::CompressedKernel> out;
  out.reserve(static_cast<std::size_t>(w.alpha_max));
  for (int i = 1; i <= w.alpha_max; ++i) {
    DOKernel k = kc.gl_nodes > 0 ? kernels::discretize_kernel(w, i, kc.gl_nodes)
                                 : kernels::make_kernel(w, i);
    if (kernels::kernel_is_zero(k)) {
      expsum::CompressedKernel ck;
      ck.kernel_id = kernels::kernel_id(k);
      ck.interval = i;
      ck.tolerance = opt.tol;
      ck.l1_error = 0.0;
      out.push_back(std::move(ck));
      continue;
    }
    if (!kc.allow_compute) {
      auto hit = expsum::cache_load(kc.cache_dir, k, opt);
      if (!hit)
        throw ValidationError("kernel " + kernels::kernel_id(k) +
                              " not in cache and computing is disabled");
      out.push_back(std::move(*hit));
      continue;
    }
    out.push_back(expsum::compress_cached(k, opt, kc.cache_dir));
  }
  return out;
}

std::vector<rk::ModeSpec> modes_from_kernels(const std::vector<expsum::CompressedKernel>& cks) {
  std::vector<rk::ModeSpec> modes;
  for (const auto& ck : cks)
    for (const auto& term : ck.terms) modes.push_back({ck.interval, term.weight, term.rate});
  return modes;
}

OdeResult solve_dofde(const DofdeProblem& p, const KernelControls& kc, const SolveControls& sc) {
  const int am = p.weight.alpha_max;
  if (static_cast<int>(p.init.size()) != am)
    throw std::invalid_argument("solve_dofde: need exactly alpha_max initial values");
  if (!p.f) throw std::invalid_argument("solve_dofde: missing right-hand side");

  OdeResult res;
  res.kernels = problem_kernels(p.weight, kc);
  const std::vector<rk::ModeSpec> modes = modes_from_kernels(res.kernels);

  const rk::ButcherTableau tb = rk::make_tableau(sc.scheme);
  const rk::TimeMesh mesh = rk::graded_mesh(sc.N, sc.gamma, p.T);
  rk::CondensationCache ops(tb, am, modes);

  rk::ModeSystemState st = rk::ModeSystemState::zeros(am, static_cast<int>(modes.size()), 1);
  for (int i = 0; i < am; ++i) st.deriv[i][0] = p.init[static_cast<std::size_t>(i)];

  rk::ComponentResidual F;
  F.value = [&p](double t, const double* v, double mode_sum) {
    return mode_sum - p.f(t, v[0]);
  };
  F.partials = [&p, am](double t, const double* v, double, double* dv, double* dsum) {
    for (int i = 0; i <= am; ++i) dv[i] = 0.0;
    dv[0] = p.df_du ? -p.df_du(t, v[0]) : 0.0;
    *dsum = 1.0;
  };

  res.t.reserve(static_cast<std::size_t>(sc.N) + 1);
  res.u.reserve(static_cast<std::size_t>(sc.N) + 1);
  res.t.push_back(0.0);
  res.u.push_back(st.deriv[0][0]);

  double linf = 0.0;
  if (p.reference) linf = std::abs(st.deriv[0][0] - p.reference(0.0));

  Eigen::MatrixXd guess = Eigen::MatrixXd::Zero(tb.stages(), 1);
  rk::StepDiagnostics diag;
  for (int n = 0; n < sc.N; ++n) {
    const double h = mesh.step(n);
    try {
      rk::condensed_step(st, tb, ops.get(h), F, sc.newton, &guess, &diag);
    } catch (const NumericalError& e) {
      throw NumericalError("step " + std::to_string(n + 1) + " (t = " +
                           std::to_string(mesh.t[static_cast<std::size_t>(n)]) +
                           "): " + e.what());
    }
    res.unknowns = diag.unknowns;
    res.max_newton_iters = std::max(res.max_newton_iters, diag.newton_iters);
    st.t = mesh.t[static_cast<std::size_t>(n) + 1];  // guard accumulation drift
    res.t.push_back(st.t);
    res.u.push_back(st.deriv[0][0]);
    if (p.reference) linf = std::max(linf, std::abs(st.deriv[0][0] - p.reference(st.t)));
  }
  if (p.reference) res.linf_error = linf;
  return res;
}

}  // namespace dofde::solve
