#include "sisctl/pia.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sisctl/error.hpp"

namespace sisctl {
namespace {

double normalized_l2(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc) / std::sqrt(static_cast<double>(a.size()));
}

void apply_fixed(PolicyField& policy, const FixedControl& fixed) {
  switch (fixed.target) {
    case FixedControl::Target::Eta:
      std::fill(policy.eta.begin(), policy.eta.end(), fixed.value);
      break;
    case FixedControl::Target::Rho:
      std::fill(policy.rho.begin(), policy.rho.end(), fixed.value);
      break;
    case FixedControl::Target::None:
      break;
  }
}

BoundaryEstimate estimate_boundary(const PolicyField& policy,
                                   const ModelParams& p, const CostParams& k,
                                   const PiaConfig& cfg) {
  const Grid& g = policy.grid;
  const double step =
      std::max(cfg.boundary_step_nodes * g.spacing(), cfg.boundary_step_min);
  return boundary_data(policy, p, k, cfg.mc, g.x_lo, g.x_hi, step);
}

IterationRecord make_record(int iteration, const ValueField& v,
                            const ValueField* previous,
                            const PolicyField& policy,
                            const BoundaryEstimate& boundary,
                            const ModelParams& p, const CostParams& k,
                            const PiaConfig& cfg) {
  IterationRecord rec;
  rec.iteration = iteration;
  rec.policy = policy;
  rec.value = v;
  rec.boundary = boundary;
  rec.max_residual = max_interior_residual(hjb_residual(v, p, k, cfg.rho_max),
                                           cfg.residual_edge_fraction);
  if (previous) {
    rec.error = normalized_l2(v.values(), previous->values());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      const double d = v[i] - (*previous)[i];
      if (d > 0.0) ++rec.increases;
      if (d < 0.0) ++rec.decreases;
    }
    rec.sign_sum = static_cast<long>(rec.increases) -
                   static_cast<long>(rec.decreases);
  }
  return rec;
}

}  // namespace

void PiaConfig::validate() const {
  if (!(eps > 0.0)) throw Error(ErrorKind::Validation, "pia.eps > 0 required");
  if (max_iter < 1) {
    throw Error(ErrorKind::Validation, "pia.max_iter >= 1 required");
  }
  if (!(rho_max > 0.0 && std::isfinite(rho_max))) {
    throw Error(ErrorKind::Validation, "pia.rho_max > 0 required");
  }
  if (!(boundary_step_nodes >= 1.0)) {
    throw Error(ErrorKind::Validation,
                "pia.boundary_step_nodes >= 1 required");
  }
  if (!(boundary_step_min >= 0.0)) {
    throw Error(ErrorKind::Validation, "pia.boundary_step_min >= 0 required");
  }
  if (!(residual_edge_fraction >= 0.0 && residual_edge_fraction < 0.5)) {
    throw Error(ErrorKind::Validation,
                "pia.residual_edge_fraction in [0, 0.5) required");
  }
  if (fixed.target == FixedControl::Target::Eta &&
      !(fixed.value >= 0.0 && fixed.value <= 1.0)) {
    throw Error(ErrorKind::Validation, "fixed eta in [0, 1] required");
  }
  if (fixed.target == FixedControl::Target::Rho &&
      !(fixed.value >= 0.0 && fixed.value <= rho_max)) {
    throw Error(ErrorKind::Validation, "fixed rho in [0, rho_max] required");
  }
  mc.validate();
}

std::vector<double> IterationTrace::errors() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < records.size(); ++i) {
    out.push_back(records[i].error);
  }
  return out;
}

PolicyField initial_policy(const Grid& grid, const FixedControl& fixed) {
  PolicyField policy = PolicyField::constant(grid, {0.0, 0.0});
  apply_fixed(policy, fixed);
  return policy;
}

const char* to_string(EdgeControls e) {
  return e == EdgeControls::Gradient ? "gradient" : "extrapolate";
}

EdgeControls edge_controls_from_string(const std::string& name) {
  if (name == "gradient") return EdgeControls::Gradient;
  if (name == "extrapolate") return EdgeControls::Extrapolate;
  throw Error(ErrorKind::Validation,
              "pia.edge_controls must be 'gradient' or 'extrapolate', got '" +
                  name + "'");
}

PolicyField improve_policy(const ValueField& v, const ModelParams& p,
                           const CostParams& k, const PiaConfig& cfg) {
  const Grid& grid = v.grid();
  PolicyField next{grid, std::vector<double>(grid.n),
                   std::vector<double>(grid.n)};
  const auto g = v.gradient();
  std::vector<double> grad(g.begin(), g.end());
  const std::size_t n = grid.n;
  if (cfg.edge_controls == EdgeControls::Extrapolate && n >= 6) {
    // Nodes 2, 3 and n-4, n-3 are the first whose central stencils avoid
    // v_0 and v_{n-1}.
    const double l2 = grad[2], l3 = grad[3];
    grad[1] = 2.0 * l2 - l3;
    grad[0] = 3.0 * l2 - 2.0 * l3;
    const double r2 = grad[n - 3], r3 = grad[n - 4];
    grad[n - 2] = 2.0 * r2 - r3;
    grad[n - 1] = 3.0 * r2 - 2.0 * r3;
  }
  for (std::size_t i = 0; i < grid.n; ++i) {
    const ControlPair c =
        update_controls(grid.node(i), grad[i], p, k, cfg.mode, cfg.rho_max);
    next.eta[i] = c.eta;
    next.rho[i] = c.rho;
  }
  apply_fixed(next, cfg.fixed);
  return next;
}

PiaResult run(const ModelParams& p, const CostParams& k, const Grid& grid,
              const PiaConfig& cfg) {
  p.validate();
  k.validate();
  grid.validate();
  cfg.validate();

  PiaResult result;
  PolicyField policy = initial_policy(grid, cfg.fixed);
  BoundaryEstimate boundary = estimate_boundary(policy, p, k, cfg);
  ValueField v = solve_bellman(policy, p, k, boundary.data);
  result.trace.records.push_back(
      make_record(0, v, nullptr, policy, boundary, p, k, cfg));

  for (int n = 1; n <= cfg.max_iter; ++n) {
    PolicyField next = improve_policy(v, p, k, cfg);
    if (cfg.refresh_boundary) boundary = estimate_boundary(next, p, k, cfg);
    ValueField v_next = solve_bellman(next, p, k, boundary.data);
    IterationRecord rec =
        make_record(n, v_next, &v, next, boundary, p, k, cfg);
    const double error = rec.error;
    result.trace.records.push_back(std::move(rec));
    v = std::move(v_next);
    policy = std::move(next);
    if (error < cfg.eps) {
      result.converged = true;
      break;
    }
  }
  result.policy = improve_policy(v, p, k, cfg);
  result.value = std::move(v);
  return result;
}

PolicyEvaluation evaluate_policy(const PolicyField& policy,
                                 const ModelParams& p, const CostParams& k,
                                 const PiaConfig& cfg) {
  p.validate();
  k.validate();
  policy.grid.validate();
  policy.validate(cfg.rho_max);
  PolicyEvaluation out;
  out.boundary = estimate_boundary(policy, p, k, cfg);
  out.value = solve_bellman(policy, p, k, out.boundary.data);
  return out;
}

std::vector<double> hjb_residual(const ValueField& v, const ModelParams& p,
                                 const CostParams& k, double rho_max) {
  const Grid& grid = v.grid();
  std::vector<double> out(grid.n, std::numeric_limits<double>::quiet_NaN());
  const auto grad = v.gradient();
  for (std::size_t i = 1; i + 1 < grid.n; ++i) {
    out[i] = hamiltonian_min(grid.node(i), v[i], grad[i], v.curvature(i), p, k,
                             rho_max);
  }
  return out;
}

std::vector<double> policy_residual(const ValueField& v,
                                    const PolicyField& policy,
                                    const ModelParams& p, const CostParams& k) {
  const Grid& grid = v.grid();
  std::vector<double> out(grid.n, std::numeric_limits<double>::quiet_NaN());
  const auto grad = v.gradient();
  for (std::size_t i = 1; i + 1 < grid.n; ++i) {
    out[i] = hamiltonian(grid.node(i), policy.at(i), v[i], grad[i],
                         v.curvature(i), p, k);
  }
  return out;
}

double max_interior_residual(const std::vector<double>& residual,
                             double edge_fraction) {
  const std::size_t n = residual.size();
  const auto skip = static_cast<std::size_t>(
      std::ceil(edge_fraction * static_cast<double>(n)));
  double m = 0.0;
  for (std::size_t i = std::max<std::size_t>(skip, 1);
       i + std::max<std::size_t>(skip, 1) < n; ++i) {
    m = std::max(m, std::abs(residual[i]));
  }
  return m;
}

RateFit fit_rate(const std::vector<double>& errors) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0)) {
      throw Error(ErrorKind::InsufficientData,
                  "fit_rate: errors must be strictly positive");
    }
    xs.push_back(static_cast<double>(i + 1));
    ys.push_back(std::log(errors[i]));
  }
  if (xs.size() < 3) {
    throw Error(ErrorKind::InsufficientData,
                "fit_rate: at least three iterations required");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  RateFit fit;
  fit.q_hat = std::exp(slope);
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.contracting = fit.q_hat < 1.0;
  return fit;
}

RateFit fit_rate(const IterationTrace& trace) {
  return fit_rate(trace.errors());
}

std::vector<ProbeCheck> mc_cross_validate(const ValueField& v,
                                          const PolicyField& policy,
                                          const ModelParams& p,
                                          const CostParams& k,
                                          const McConfig& cfg,
                                          const std::vector<double>& probes,
                                          double discretization_allowance) {
  const Grid& grid = v.grid();
  std::vector<ProbeCheck> out;
  for (double x : probes) {
    if (!(x > grid.x_lo && x < grid.x_hi)) {
      throw Error(ErrorKind::Domain,
                  "mc_cross_validate: probe outside the grid interior");
    }
    ProbeCheck check;
    check.x = x;
    check.value = v.interpolate(x);
    check.estimate = estimate_cost(x, policy, p, k, cfg);
    check.tolerance = 3.0 * check.estimate.std_err +
                      check.estimate.tail_bound + discretization_allowance;
    check.pass = std::abs(check.value - check.estimate.mean) <= check.tolerance;
    out.push_back(check);
  }
  return out;
}

}  // namespace sisctl
