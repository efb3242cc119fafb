#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <dofde/errors.hpp>
#include <dofde/kernel_cache.hpp>
#include <dofde/ode_solver.hpp>
#include <dofde/pde_solver.hpp>
#include <dofde/scenarios.hpp>
#include <dofde/weights.hpp>

#include "run_config.hpp"
#include "study.hpp"

namespace dofde::cli {

namespace {

const std::vector<double> kDefaultTolerances = {1e-6, 1e-10, 1e-13, 1e-20, 1e-30, 1e-40};

int scenario_fixed_terms(const RunConfig& c) {
  if (c.fixed_terms >= 0) return c.fixed_terms;
  if (c.scenario == "dowave2d" || c.scenario == "geometric_eta" ||
      c.scenario == "randomfield_eta")
    return 20;
  return 0;
}

solve::KernelControls kernel_controls(const RunConfig& c, bool certify_default) {
  solve::KernelControls kc;
  kc.tol = c.tol;
  kc.precision = c.precision;
  kc.fixed_terms = scenario_fixed_terms(c);
  kc.cache_dir = c.resolved_cache();
  kc.certify = c.certify >= 0 ? c.certify != 0 : certify_default;
  return kc;
}

void emit_metadata(const RunConfig& c, const std::string& command,
                   nlohmann::ordered_json extra = {}) {
  nlohmann::ordered_json meta = c.resolved(command);
  for (auto& [k, v] : extra.items()) meta[k] = v;
  write_file(c.out + "/metadata.json", meta.dump(2) + "\n");
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

rk::Scheme parse_scheme(const std::string& name) {
  try {
    return rk::scheme_from_string(name);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

std::vector<int> sorted_ns(const RunConfig& c) {
  require(!c.ns.empty(), "n list is required");
  std::vector<int> ns = c.ns;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  require(ns.front() >= 1, "n must be positive");
  return ns;
}

// compress: one kernel document per interval, written to the cache and
// mirrored into the output directory.
int cmd_compress(const RunConfig& c) {
  require(!c.kernels.empty(), "compress needs at least one kernel id");
  expsum::CompressOptions opt;
  opt.tol = c.tol;
  opt.fixed_terms = std::max(c.fixed_terms, 0);
  opt.precision = c.precision;
  opt.certify = c.certify != 0;  // default on
  const std::string dir = c.resolved_cache();

  std::string csv = "kernel,tolerance,m,l1_error\n";
  for (const std::string& id : c.kernels) {
    kernels::WeightFunction w = kernels::weight_from_id(id);
    for (int i = 1; i <= w.alpha_max; ++i) {
      kernels::DOKernel k = kernels::make_kernel(w, i);
      const std::string kid = kernels::kernel_id(k);
      if (kernels::kernel_is_zero(k)) {
        std::printf("%-24s m=0        (zero kernel)\n", kid.c_str());
        csv += kid + "," + fmt17(c.tol) + ",0,0\n";
        continue;
      }
      const bool hit = expsum::cache_load(dir, k, opt).has_value();
      expsum::CompressedKernel ck = expsum::compress_cached(k, opt, dir);
      expsum::cache_store(c.out, ck);
      std::printf("%-24s m=%-4d l1=%.3e  (%s)\n", kid.c_str(), ck.m(), ck.l1_error,
                  hit ? "cache hit" : "computed");
      csv += kid + "," + fmt17(ck.tolerance) + "," + std::to_string(ck.m()) + "," +
             fmt17(ck.l1_error) + "\n";
    }
  }
  write_file(c.out + "/compress.csv", csv);
  emit_metadata(c, "compress");
  return 0;
}

// validate-kernel: tolerance sweep with certified errors.
int cmd_validate_kernel(const RunConfig& c) {
  require(!c.kernels.empty(), "validate-kernel needs at least one kernel id");
  const std::vector<double>& tols = c.tolerances.empty() ? kDefaultTolerances : c.tolerances;
  const std::string dir = c.resolved_cache();

  std::string csv = "kernel,tolerance,m,l1_error\n";
  for (const std::string& id : c.kernels) {
    kernels::WeightFunction w = kernels::weight_from_id(id);
    for (double tol : tols) {
      expsum::CompressOptions opt;
      opt.tol = tol;
      opt.precision = c.precision;
      opt.certify = c.certify != 0;
      for (int i = 1; i <= w.alpha_max; ++i) {
        kernels::DOKernel k = kernels::make_kernel(w, i);
        const std::string kid = kernels::kernel_id(k);
        if (kernels::kernel_is_zero(k)) {
          csv += kid + "," + fmt17(tol) + ",0,0\n";
          continue;
        }
        expsum::CompressedKernel ck = expsum::compress_cached(k, opt, dir);
        std::printf("%-24s tol=%-8.1e m=%-4d l1=%.3e\n", kid.c_str(), tol, ck.m(),
                    ck.l1_error);
        csv += kid + "," + fmt17(tol) + "," + std::to_string(ck.m()) + "," +
               fmt17(ck.l1_error) + "\n";
      }
    }
  }
  write_file(c.out + "/validate.csv", csv);
  emit_metadata(c, "validate-kernel");
  return 0;
}

int cmd_solve_ode(const RunConfig& c) {
  require(scen::is_ode_scenario(c.scenario),
          "solve-ode needs an ODE scenario (example1 | example2), got '" + c.scenario + "'");
  require(c.schemes.size() == 1, "solve-ode takes a single scheme");
  require(c.ns.size() == 1, "solve-ode takes a single n");
  require(c.gammas.size() <= 1, "solve-ode takes a single gamma");

  solve::DofdeProblem p = scen::ode_scenario(c.scenario);
  if (c.horizon > 0.0) p.T = c.horizon;
  solve::SolveControls sc;
  sc.scheme = parse_scheme(c.schemes[0]);
  sc.N = c.ns[0];
  sc.gamma = c.gammas.empty() ? 1.0 : c.gammas[0];

  solve::OdeResult r = solve::solve_dofde(p, kernel_controls(c, false), sc);

  std::string csv = p.reference ? "t,u,reference,abs_error\n" : "t,u\n";
  for (std::size_t k = 0; k < r.t.size(); ++k) {
    csv += fmt17(r.t[k]) + "," + fmt17(r.u[k]);
    if (p.reference) {
      const double ref = p.reference(r.t[k]);
      csv += "," + fmt17(ref) + "," + fmt17(std::abs(r.u[k] - ref));
    }
    csv += '\n';
  }
  write_file(c.out + "/trajectory.csv", csv);

  int m_total = 0;
  for (const auto& ck : r.kernels) m_total += ck.m();
  nlohmann::ordered_json extra;
  extra["final_value"] = r.u.back();
  extra["unknowns_per_step"] = r.unknowns;
  extra["mode_count"] = m_total;
  extra["max_newton_iterations"] = r.max_newton_iters;
  if (r.linf_error >= 0.0) extra["linf_error"] = r.linf_error;
  emit_metadata(c, "solve-ode", extra);

  std::printf("%s %s N=%d: u(%g) = %.12g", c.scenario.c_str(), c.schemes[0].c_str(), sc.N,
              p.T, r.u.back());
  if (r.linf_error >= 0.0) std::printf(", max error %.3e", r.linf_error);
  std::printf(" (%d modes, newton <= %d)\n", m_total, r.max_newton_iters);
  return 0;
}

int cmd_solve_pde(const RunConfig& c) {
  require(scen::is_pde_scenario(c.scenario),
          "solve-pde needs a PDE scenario (table1 | dowave2d | geometric_eta | "
          "randomfield_eta), got '" +
              c.scenario + "'");
  require(c.schemes.size() == 1, "solve-pde takes a single scheme");
  require(c.ns.size() == 1, "solve-pde takes a single n");
  require(c.gammas.size() <= 1, "solve-pde takes a single gamma");

  fd::GridSpec g;
  g.dimension = 2;
  g.cells = c.grid;
  solve::DopdeProblem p =
      scen::pde_scenario(c.scenario, g, kernel_controls(c, false), c.seed, c.radius);

  solve::PdeControls pc;
  pc.scheme = parse_scheme(c.schemes[0]);
  pc.N = c.ns[0];
  pc.gamma = c.gammas.empty() ? 1.0 : c.gammas[0];
  pc.T = c.horizon > 0.0 ? c.horizon : scen::default_horizon(c.scenario);
  pc.snapshot_times = c.resolved_snapshots(pc.T);

  solve::PdeResult r = solve::solve_dopde(p, pc);

  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
    std::string csv = "x,y,u\n";
    double x, y;
    for (int xn = 0; xn < fd::grid_ndof(g); ++xn) {
      fd::grid_coords(g, xn, x, y);
      csv += fmt17(x) + "," + fmt17(y) + "," + fmt17(r.snapshots[k].second[xn]) + '\n';
    }
    const std::string name = "snapshot_" + std::to_string(k) + ".csv";
    write_file(c.out + "/" + name, csv);
    files.push_back({{"file", name}, {"t", r.snapshots[k].first}});
  }

  nlohmann::ordered_json extra;
  extra["snapshots"] = files;
  extra["unknowns_per_step"] = r.unknowns;
  extra["modes_per_node"] = p.table.total_terms();
  extra["final_l2_norm"] = fd::grid_l2_norm(g, r.u);
  extra["seconds_per_step"] = r.step_seconds;
  if (r.linf_l2_error >= 0.0) extra["linf_l2_error"] = r.linf_l2_error;
  emit_metadata(c, "solve-pde", extra);

  std::printf("%s %s N=%d grid=%d: |u(T)|_L2 = %.6e", c.scenario.c_str(), c.schemes[0].c_str(),
              pc.N, c.grid, fd::grid_l2_norm(g, r.u));
  if (r.linf_l2_error >= 0.0) std::printf(", max error %.3e", r.linf_l2_error);
  std::printf(" (%zu snapshots, %.3g s/step)\n", r.snapshots.size(), r.step_seconds);
  return 0;
}

int cmd_converge(const RunConfig& c) {
  const bool ode = scen::is_ode_scenario(c.scenario);
  require(ode || scen::is_pde_scenario(c.scenario), "unknown scenario '" + c.scenario + "'");
  require(!c.schemes.empty(), "converge needs a scheme list");
  const std::vector<int> ns = sorted_ns(c);
  const std::vector<double> gammas = c.gammas.empty() ? std::vector<double>{1.0} : c.gammas;

  solve::KernelControls kc = kernel_controls(c, false);
  std::vector<StudyRow> rows;

  if (ode) {
    solve::DofdeProblem p = scen::ode_scenario(c.scenario);
    require(p.reference != nullptr, "scenario has no reference solution to converge against");
    if (c.horizon > 0.0) p.T = c.horizon;
    for (const std::string& scheme : c.schemes) {
      for (double gamma : gammas) {
        for (int n : ns) {
          solve::SolveControls sc;
          sc.scheme = parse_scheme(scheme);
          sc.N = n;
          sc.gamma = gamma;
          solve::OdeResult r = solve::solve_dofde(p, kc, sc);
          rows.push_back({scheme, gamma, n, p.T / n, r.linf_error});
        }
      }
    }
  } else {
    fd::GridSpec g;
    g.dimension = 2;
    g.cells = c.grid;
    solve::DopdeProblem p = scen::pde_scenario(c.scenario, g, kc, c.seed, c.radius);
    require(p.reference != nullptr, "scenario has no reference solution to converge against");
    const double T = c.horizon > 0.0 ? c.horizon : scen::default_horizon(c.scenario);
    for (const std::string& scheme : c.schemes) {
      for (double gamma : gammas) {
        for (int n : ns) {
          solve::PdeControls pc;
          pc.scheme = parse_scheme(scheme);
          pc.N = n;
          pc.gamma = gamma;
          pc.T = T;
          solve::PdeResult r = solve::solve_dopde(p, pc);
          rows.push_back({scheme, gamma, n, T / n, r.linf_l2_error});
        }
      }
    }
  }

  annotate_rates(rows);
  write_file(c.out + "/converge.csv", study_csv(rows));

  nlohmann::ordered_json rates;
  const std::size_t group = ns.size();
  for (std::size_t first = 0; first < rows.size(); first += group) {
    const double r = asymptotic_rate(rows, first, first + group);
    std::string key = rows[first].scheme + "/gamma=" + fmt17(rows[first].gamma);
    if (std::isfinite(r)) {
      rates[key] = r;
      std::printf("%-32s asymptotic rate %.3f\n", key.c_str(), r);
    } else {
      rates[key] = nullptr;
      std::printf("%-32s asymptotic rate n/a\n", key.c_str());
    }
  }
  nlohmann::ordered_json extra;
  extra["asymptotic_rates"] = rates;
  emit_metadata(c, "converge", extra);
  return 0;
}

}  // namespace

}  // namespace dofde::cli

int main(int argc, char** argv) {
  using namespace dofde::cli;

  CLI::App app{"distributed-order fractional differential equation toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, cache_dir, scenario;
  std::vector<std::string> kernels, schemes;
  std::vector<int> ns;
  std::vector<double> gammas;
  double tol = 0.0, horizon = 0.0, radius = 0.0;
  int grid = 0, precision = 0, fixed = 0;
  std::uint64_t seed = 0;

  auto* o_config = app.add_option("--config", config_path, "JSON run configuration");
  auto* o_out = app.add_option("--out", out_dir, "output directory");
  auto* o_cache = app.add_option("--cache", cache_dir, "kernel cache directory");
  auto* o_scenario = app.add_option("--scenario", scenario, "problem scenario name");
  auto* o_kernel =
      app.add_option("--kernel", kernels, "kernel weight id(s)")->delimiter(',');
  auto* o_scheme =
      app.add_option("--scheme", schemes, "Runge-Kutta scheme name(s)")->delimiter(',');
  auto* o_n = app.add_option("--n", ns, "time step count(s)")->delimiter(',');
  auto* o_gamma = app.add_option("--gamma", gammas, "mesh grading exponent(s)")->delimiter(',');
  auto* o_tol = app.add_option("--tol", tol, "kernel compression tolerance");
  auto* o_t = app.add_option("--t", horizon, "time horizon override");
  auto* o_grid = app.add_option("--grid", grid, "grid cells per side");
  auto* o_precision = app.add_option("--precision", precision, "compression precision bits");
  auto* o_m = app.add_option("--m", fixed, "fixed exponential term count");
  auto* o_radius = app.add_option("--radius", radius, "bump weight half-width");
  auto* o_seed = app.add_option("--seed", seed, "random field seed");

  const char* names[] = {"compress", "validate-kernel", "solve-ode", "solve-pde", "converge"};
  const char* descs[] = {"compress kernels into exponential sums",
                         "tolerance sweep with certified L1 errors",
                         "run a scalar scenario and emit the trajectory",
                         "run a field scenario and emit snapshots",
                         "convergence study over schemes, gradings and step counts"};
  for (int k = 0; k < 5; ++k) app.add_subcommand(names[k], descs[k])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    RunConfig c;
    if (o_config->count()) c.apply_file(config_path);
    if (o_out->count()) c.out = out_dir;
    if (o_cache->count()) c.cache = cache_dir;
    if (o_scenario->count()) c.scenario = scenario;
    if (o_kernel->count()) c.kernels = kernels;
    if (o_scheme->count()) c.schemes = schemes;
    if (o_n->count()) c.ns = ns;
    if (o_gamma->count()) c.gammas = gammas;
    if (o_tol->count()) c.tol = tol;
    if (o_t->count()) c.horizon = horizon;
    if (o_grid->count()) c.grid = grid;
    if (o_precision->count()) c.precision = precision;
    if (o_m->count()) c.fixed_terms = fixed;
    if (o_radius->count()) c.radius = radius;
    if (o_seed->count()) c.seed = seed;
    if (c.schemes.empty()) c.schemes = {"radau_iia_2"};
    if (c.ns.empty()) c.ns = {100};

    if (c.grid < 2) throw ConfigError("grid must be at least 2 cells per side");
    if (!(c.tol > 0.0) || c.tol >= 1.0) throw ConfigError("tol must be in (0, 1)");
    std::filesystem::create_directories(c.out);

    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "compress") return cmd_compress(c);
    if (cmd == "validate-kernel") return cmd_validate_kernel(c);
    if (cmd == "solve-ode") return cmd_solve_ode(c);
    if (cmd == "solve-pde") return cmd_solve_pde(c);
    return cmd_converge(c);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
