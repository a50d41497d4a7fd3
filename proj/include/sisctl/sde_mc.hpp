#pragma once

// Monte-Carlo estimation of the discounted cost functional
//
//   J(x) = E_x [ int_0^inf e^{-delta t} f(X_t, u(X_t)) dt ]
//
// for a fixed feedback policy u, via Euler-Maruyama with interior clamping.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sisctl/bvp.hpp"
#include "sisctl/fields.hpp"
#include "sisctl/model.hpp"

namespace sisctl {

enum class Quadrature {
  LeftEndpoint,  // f frozen at the start of each step
  Trapezoidal,   // f averaged over both ends of each step
};

const char* to_string(Quadrature q);
Quadrature quadrature_from_string(const std::string& name);

struct McConfig {
  double dt = 0.01;
  // Truncation time; values <= 0 select
  // max(200, ln(f_max / (delta tail_tolerance)) / delta).
  double horizon = 0.0;
  std::size_t n_paths = 1000;
  std::uint64_t seed = 20250101;
  double clamp_eps = 1e-10;
  // Paths per RNG stream. Stream s is seeded from (seed, s) only, so the
  // samples do not depend on how batches are scheduled.
  std::size_t batch_size = 50;
  Quadrature quadrature = Quadrature::LeftEndpoint;
  double tail_tolerance = 1e-4;
  // Adds e^{-delta T} f(X_T) / delta to each sample, the tail integral with
  // the state frozen at T. Exact for constant costs; the truncation error
  // stays within tail_bound either way.
  bool tail_closure = true;
  // boundary_data() flags the Neumann estimate when its standard error
  // exceeds this fraction of its magnitude.
  double neumann_warn_fraction = 0.25;
  unsigned workers = 1;

  void validate() const;
};

// Effective (step-aligned) truncation time for a cost bound f_max.
double resolve_horizon(const McConfig& cfg, double delta, double f_max);

struct PathSample {
  double cost = 0.0;
  std::size_t clamp_count = 0;
};

// One discounted-cost sample: the first path of RNG stream `stream`.
PathSample simulate_path(double x0, const PolicyField& policy,
                         const ModelParams& p, const CostParams& k,
                         const McConfig& cfg, std::uint64_t stream);

// States X_0, X_dt, ... of the first path of `stream`, over `steps` steps.
std::vector<double> simulate_trajectory(double x0, const PolicyField& policy,
                                        const ModelParams& p,
                                        const McConfig& cfg,
                                        std::uint64_t stream,
                                        std::size_t steps);

struct CostEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  double tail_bound = 0.0;  // e^{-delta T} f_max / delta
  std::size_t n_paths = 0;
  double horizon = 0.0;
  std::size_t clamp_count = 0;
};

// Per-path samples in path order; path j belongs to stream j / batch_size and
// runs on an engine seeded from that stream's (j % batch_size)-th draw.
std::vector<double> sample_costs(double x0, const PolicyField& policy,
                                 const ModelParams& p, const CostParams& k,
                                 const McConfig& cfg,
                                 std::size_t* clamp_count = nullptr);

CostEstimate estimate_cost(double x0, const PolicyField& policy,
                           const ModelParams& p, const CostParams& k,
                           const McConfig& cfg);

struct BoundaryEstimate {
  BoundaryData data;
  double dirichlet_err = 0.0;
  double neumann_err = 0.0;
  double fd_step = 0.0;
  double tail_bound = 0.0;
  CostEstimate left;
  CostEstimate right;
  CostEstimate right_inner;
  bool neumann_noisy = false;
  std::string warning;
};

// Dirichlet value at x_lo and a one-sided Neumann slope at x_hi, both from
// Monte Carlo. The two Neumann points share every RNG stream (common random
// numbers) and the slope error is the standard error of the per-path
// difference quotients.
BoundaryEstimate boundary_data(const PolicyField& policy,
                               const ModelParams& p, const CostParams& k,
                               const McConfig& cfg, double x_lo, double x_hi,
                               double fd_step);

}  // namespace sisctl
