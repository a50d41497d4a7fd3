#pragma once

// Policy improvement on the Bellman ODE: solve the linear ODE under the
// current policy, update the controls pointwise from the new gradient, and
// stop at the first iteration whose normalized L2 change
// ||v^{n} - v^{n-1}||_2 / sqrt(N) drops below eps.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sisctl/bvp.hpp"
#include "sisctl/fields.hpp"
#include "sisctl/model.hpp"
#include "sisctl/sde_mc.hpp"

namespace sisctl {

// A control held fixed for the whole run; its update branch is skipped.
struct FixedControl {
  enum class Target { None, Eta, Rho };
  Target target = Target::None;
  double value = 0.0;

  static FixedControl none() { return {}; }
  static FixedControl eta(double v) { return {Target::Eta, v}; }
  static FixedControl rho(double v) { return {Target::Rho, v}; }
};

// Gradient used by the control update at the two nodes nearest each edge.
// Gradient: the field gradient (one-sided at the edge nodes). Extrapolate:
// linear extrapolation of the central gradients at the first two nodes whose
// stencil avoids the boundary values, so Monte-Carlo boundary noise does not
// enter the edge controls.
enum class EdgeControls { Gradient, Extrapolate };
const char* to_string(EdgeControls e);
EdgeControls edge_controls_from_string(const std::string& name);

struct PiaConfig {
  double eps = 1e-4;
  int max_iter = 100;
  UpdateMode mode = UpdateMode::ExactFoc;
  // Re-estimate the Monte-Carlo boundary data under every new policy; when
  // false the data from the first solve is reused.
  bool refresh_boundary = true;
  double rho_max = kDefaultRhoMax;
  // Neumann finite-difference step in units of the grid spacing.
  double boundary_step_nodes = 5.0;
  // Lower bound on that step. The edge control follows the Neumann slope, and
  // with steps much shorter than one Euler step of the drift the two can
  // lock into a spurious high-rho state on fine grids.
  double boundary_step_min = 5e-3;
  // Fraction of nodes at each edge excluded from the residual diagnostic.
  double residual_edge_fraction = 0.05;
  EdgeControls edge_controls = EdgeControls::Extrapolate;
  FixedControl fixed;
  McConfig mc;

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;    // 0 is the initial solve under u^0
  double error = 0.0;   // ||v^n - v^{n-1}||_2 / sqrt(N); 0 for iteration 0
  double max_residual = 0.0;
  BoundaryEstimate boundary;
  // Sum over interior nodes of sign(v^n - v^{n-1}), with the split counts.
  long sign_sum = 0;
  std::size_t increases = 0;
  std::size_t decreases = 0;
  PolicyField policy;  // u^n, the policy solved at this iteration
  ValueField value;    // v^n
};

struct IterationTrace {
  std::vector<IterationRecord> records;

  // Errors e_1, e_2, ...; one per iteration after the initial solve.
  std::vector<double> errors() const;
  std::size_t iterations() const {
    return records.empty() ? 0 : records.size() - 1;
  }
};

struct PiaResult {
  ValueField value;     // last solved v^n
  PolicyField policy;   // u^{n+1}, the update computed from v^n
  IterationTrace trace;
  bool converged = false;
};

PolicyField initial_policy(const Grid& grid, const FixedControl& fixed);

// Pointwise control update over the whole grid, honouring a fixed control.
PolicyField improve_policy(const ValueField& v, const ModelParams& p,
                           const CostParams& k, const PiaConfig& cfg);

PiaResult run(const ModelParams& p, const CostParams& k, const Grid& grid,
              const PiaConfig& cfg);

// Evaluates a fixed policy: Monte-Carlo boundary data plus one linear solve.
struct PolicyEvaluation {
  ValueField value;
  BoundaryEstimate boundary;
};
PolicyEvaluation evaluate_policy(const PolicyField& policy,
                                 const ModelParams& p, const CostParams& k,
                                 const PiaConfig& cfg);

// HJB residual inf_u {b v' + sigma^2 v'' / 2 - delta v + f} at interior
// nodes; the two edge entries are NaN.
std::vector<double> hjb_residual(const ValueField& v, const ModelParams& p,
                                 const CostParams& k,
                                 double rho_max = kDefaultRhoMax);

// Linear residual b v' + sigma^2 v'' / 2 - delta v + f under a given policy
// at interior nodes; the two edge entries are NaN.
std::vector<double> policy_residual(const ValueField& v,
                                    const PolicyField& policy,
                                    const ModelParams& p, const CostParams& k);

// Largest |residual| after dropping `edge_fraction` of the nodes at each edge.
double max_interior_residual(const std::vector<double>& residual,
                             double edge_fraction);

struct RateFit {
  double q_hat = 0.0;  // exp(slope) of log e_n against n
  double r2 = 0.0;
  bool contracting = false;  // q_hat < 1
};

// Least-squares geometric rate; throws Error(InsufficientData) unless there
// are at least three strictly positive errors.
RateFit fit_rate(const std::vector<double>& errors);
RateFit fit_rate(const IterationTrace& trace);

struct ProbeCheck {
  double x = 0.0;
  double value = 0.0;  // v interpolated at x
  CostEstimate estimate;
  double tolerance = 0.0;
  bool pass = false;
};

// Compares v with direct Monte-Carlo estimates of J under `policy`. A probe
// passes when |v(x) - mean| <= 3 std_err + tail_bound + discretization
// allowance.
std::vector<ProbeCheck> mc_cross_validate(const ValueField& v,
                                          const PolicyField& policy,
                                          const ModelParams& p,
                                          const CostParams& k,
                                          const McConfig& cfg,
                                          const std::vector<double>& probes,
                                          double discretization_allowance);

}  // namespace sisctl
