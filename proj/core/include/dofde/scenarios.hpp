#pragma once

#include <cstdint>
#include <string>

#include "dofde/pde_solver.hpp"

namespace dofde::scen {

// Scalar benchmark problems with known analytical solutions.
//
// example1: phi(a) = exp(-a) Gamma(6-a) on [0,2], zero initial data,
//           u(t) = t^5, nonlinear right-hand side via g(u) = cos(100u/(1+sqrt u)).
// example2: phi(a) = Gamma(4-a) on [0,2], u(0) = 4, u'(0) = 2, u(t) = t^3+2t+4;
//           the right-hand side is not differentiable at t = 0.
solve::DofdeProblem example1();
solve::DofdeProblem example2();

// Forcing terms, exposed for tests. Both have removable singularities
// (t = 1/e resp. t = 1) evaluated by local series.
double example1_rhs(double t);
double example2_rhs(double t);

// 1D/2D eigenvalue of the discrete Dirichlet Laplacian for the mode
// sin(k pi x) sampled on the grid.
double laplacian_eigenvalue(const fd::GridSpec& g, int k);

// Diffusion-wave problems.
//
// table1: manufactured solution sin(4 pi x) sin(4 pi y) t^5 with the forcing
//         built against the discrete Laplacian eigenvalue, so the recorded
//         error is purely temporal. Weight of example1, eps = 1, T = 1.
// dowave2d: bump weight centered at 2, a short uniform forcing pulse on
//         t in (0, 0.1), zero initial data, T = 2.
// geometric_eta: space-dependent bump center, quadrant-wise values
//         {0.5, 1.17, 1.83, 2.5}, radius 0.3, alpha_max = 3, point sources
//         at the quadrant centers, eps = 0.2, T = 3.
// randomfield_eta: bump center from a seeded smooth random field quantized
//         to 8 values in [0.625, 2.375]; otherwise like geometric_eta.
solve::DopdeProblem table1(const fd::GridSpec& g, const solve::KernelControls& kc);
solve::DopdeProblem dowave2d(const fd::GridSpec& g, const solve::KernelControls& kc,
                             double radius = 0.5);
solve::DopdeProblem geometric_eta(const fd::GridSpec& g, const solve::KernelControls& kc);
solve::DopdeProblem randomfield_eta(const fd::GridSpec& g, const solve::KernelControls& kc,
                                    std::uint64_t seed);

// Scenario registry for the command line. T_default reports the natural
// horizon of each scenario.
bool is_pde_scenario(const std::string& name);
bool is_ode_scenario(const std::string& name);
double default_horizon(const std::string& name);

solve::DofdeProblem ode_scenario(const std::string& name);
solve::DopdeProblem pde_scenario(const std::string& name, const fd::GridSpec& g,
                                 const solve::KernelControls& kc, std::uint64_t seed,
                                 double radius = 0.5);

}  // namespace dofde::scen
