#include "sisctl/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sisctl/bvp.hpp"
#include "sisctl/error.hpp"

namespace sisctl {
namespace {

std::string fmt(const char* spec, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, a);
  return buf;
}

double manufactured_error(const ModelParams& p, Grid grid, std::size_t n) {
  grid.n = n;
  const PolicyField u = PolicyField::constant(grid, {1.0, 0.0});
  LinearCoefficients c = coefficients_for(u, p, CostParams{});
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.node(i);
    const double s = c.diffusion[i];
    c.source[i] = p.delta * x * x - s * s - 2.0 * c.drift[i] * x;
  }
  const ValueField v =
      solve_bellman(grid, c, {grid.x_lo * grid.x_lo, 2.0 * grid.x_hi});
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.node(i);
    err = std::max(err, std::abs(v[i] - x * x));
  }
  return err;
}

}  // namespace

ConstantCostCheck constant_cost_check(const BaseSetup& base) {
  ConstantCostCheck out;
  const CostParams k{base.cost.a0, 0.0, 0.0, 0.0, 0.0};
  PiaConfig cfg = base.pia;
  cfg.fixed = FixedControl::none();
  out.expected = k.a0 / base.model.delta;
  const PiaResult r = run(base.model, k, base.grid, cfg);
  out.converged = r.converged;
  out.iterations = r.trace.iterations();
  for (double v : r.value.values()) {
    out.max_abs_error = std::max(out.max_abs_error, std::abs(v - out.expected));
  }
  out.mc = estimate_cost(0.5, r.policy, base.model, k, base.pia.mc);
  const bool mc_ok = std::abs(out.mc.mean - out.expected) <=
                     3.0 * out.mc.std_err + out.mc.tail_bound;
  out.pass = out.converged && out.iterations == 1 && out.max_abs_error < 1e-6 &&
             mc_ok;
  return out;
}

ManufacturedCheck manufactured_check(const ModelParams& p, const Grid& grid,
                                     std::size_t n_coarse, std::size_t n_fine) {
  ManufacturedCheck out;
  out.error_coarse = manufactured_error(p, grid, n_coarse);
  out.error_fine = manufactured_error(p, grid, n_fine);
  out.ratio = out.error_coarse / out.error_fine;
  out.pass = out.ratio >= 1.8;
  return out;
}

double cross_validation_allowance(const TraceSummary& trace, const Grid& grid,
                                  double discretization_constant) {
  return discretization_constant * grid.spacing() +
         3.0 * (trace.dirichlet_err + trace.neumann_err * (grid.x_hi - grid.x_lo));
}

McConfig cross_validation_mc(const McConfig& mc) {
  McConfig out = mc;
  out.seed = mc.seed ^ 0x9E3779B97F4A7C15ULL;
  return out;
}

std::vector<OracleResult> run_oracles(const RunConfig& cfg) {
  std::vector<OracleResult> out;

  const ConstantCostCheck cc = constant_cost_check(cfg.base);
  out.push_back(
      {"constant cost J = a0/delta", cc.pass,
       "J=" + fmt("%.6g", cc.expected) + " max|v-J|=" + fmt("%.3g", cc.max_abs_error) +
           " iterations=" + std::to_string(cc.iterations) + " mc=" +
           fmt("%.6f", cc.mc.mean) + "+-" + fmt("%.2g", cc.mc.std_err)});

  const ManufacturedCheck ms = manufactured_check(cfg.base.model, cfg.base.grid, 500, 1000);
  out.push_back({"manufactured v = x^2 (n=500 vs 1000)", ms.pass,
                 "err500=" + fmt("%.3g", ms.error_coarse) + " err1000=" +
                     fmt("%.3g", ms.error_fine) + " ratio=" + fmt("%.3f", ms.ratio)});

  ExperimentSpec spec{"validate", cfg.base, Variant::benchmark()};
  PiaResult solution;
  const RunArtifact a = run_solve(spec, &solution);
  out.push_back({"policy improvement converged", a.trace.converged,
                 "iterations=" + std::to_string(a.trace.iterations)});

  const double vmax = solution.value.max_abs();
  const double limit = 1e-2 * cfg.base.model.delta * vmax;
  out.push_back({"HJB residual < 1e-2 delta max|v|",
                 a.trace.max_interior_residual < limit,
                 "max=" + fmt("%.3g", a.trace.max_interior_residual) + " limit=" +
                     fmt("%.3g", limit)});

  const double allowance = cross_validation_allowance(
      a.trace, cfg.base.grid, cfg.validation.discretization_constant);
  const auto probes = mc_cross_validate(
      solution.value, solution.policy, cfg.base.model, cfg.base.cost,
      cross_validation_mc(cfg.base.pia.mc), cfg.validation.probes, allowance);
  for (const auto& p : probes) {
    out.push_back({"MC cross-validation x=" + fmt("%g", p.x), p.pass,
                   "v=" + fmt("%.5f", p.value) + " mc=" + fmt("%.5f", p.estimate.mean) +
                       "+-" + fmt("%.2g", p.estimate.std_err) + " tol=" +
                       fmt("%.3g", p.tolerance)});
  }
  return out;
}

}  // namespace sisctl
