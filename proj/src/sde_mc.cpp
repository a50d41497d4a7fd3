#include "sisctl/sde_mc.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "sisctl/error.hpp"
#include "sisctl/parallel.hpp"

namespace sisctl {
namespace {

using Engine = boost::random::mt19937_64;
using Normal = boost::random::normal_distribution<double>;

Engine stream_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return Engine(seq);
}

// Each path runs on its own engine seeded from the next draw of its batch
// stream, so a path's noise does not depend on how many normals earlier
// paths consumed (and common random numbers survive a change of horizon).
Engine path_engine(Engine& stream) { return Engine(stream()); }

// Single-index lookup of both policy components.
class PolicyLookup {
 public:
  explicit PolicyLookup(const PolicyField& policy)
      : policy_(policy),
        lo_(policy.grid.x_lo),
        hi_(policy.grid.x_hi),
        inv_h_(1.0 / policy.grid.spacing()),
        last_(policy.grid.n - 1) {}

  ControlPair operator()(double x) const {
    if (x <= lo_) return policy_.at(0);
    if (x >= hi_) return policy_.at(last_);
    const double s = (x - lo_) * inv_h_;
    auto i = static_cast<std::size_t>(s);
    if (i >= last_) i = last_ - 1;
    const double w = s - static_cast<double>(i);
    const double eta =
        policy_.eta[i] + w * (policy_.eta[i + 1] - policy_.eta[i]);
    const double rho =
        policy_.rho[i] + w * (policy_.rho[i + 1] - policy_.rho[i]);
    return {std::clamp(eta, 0.0, 1.0), std::max(rho, 0.0)};
  }

 private:
  const PolicyField& policy_;
  double lo_;
  double hi_;
  double inv_h_;
  std::size_t last_;
};

struct Stepper {
  const PolicyLookup& policy;
  const ModelParams& p;
  const CostParams& k;
  double dt;
  double sqrt_dt;
  double lo;
  double hi;
  std::size_t steps;
  double step_weight;  // int_0^dt e^{-delta s} ds
  double decay;        // e^{-delta dt}
  bool trapezoidal;
  bool tail_closure;

  Stepper(const PolicyLookup& pol, const ModelParams& mp, const CostParams& cp,
          const McConfig& cfg, double horizon)
      : policy(pol),
        p(mp),
        k(cp),
        dt(cfg.dt),
        sqrt_dt(std::sqrt(cfg.dt)),
        lo(cfg.clamp_eps),
        hi(1.0 - cfg.clamp_eps),
        steps(static_cast<std::size_t>(std::llround(horizon / cfg.dt))),
        step_weight(-std::expm1(-mp.delta * cfg.dt) / mp.delta),
        decay(std::exp(-mp.delta * cfg.dt)),
        trapezoidal(cfg.quadrature == Quadrature::Trapezoidal),
        tail_closure(cfg.tail_closure) {}

  double clamp(double x, std::size_t& clamps) const {
    if (x < lo) {
      ++clamps;
      return lo;
    }
    if (x > hi) {
      ++clamps;
      return hi;
    }
    return x;
  }

  template <class Observer>
  PathSample run(double x0, Engine& engine,
                 Normal& normal,
                 Observer&& observe) const {
    PathSample out;
    double x = clamp(x0, out.clamp_count);
    double discount = 1.0;
    ControlPair c = policy(x);
    double f = running_cost(x, c, k);
    observe(x);
    for (std::size_t i = 0; i < steps; ++i) {
      const double b = drift(x, c, p);
      const double s = p.sigma * x * (1.0 - x);
      x = clamp(x + b * dt + s * sqrt_dt * normal(engine), out.clamp_count);
      observe(x);
      const ControlPair c_next = policy(x);
      const double f_next = running_cost(x, c_next, k);
      const double integrand = trapezoidal ? 0.5 * (f + f_next) : f;
      out.cost += discount * step_weight * integrand;
      discount *= decay;
      c = c_next;
      f = f_next;
    }
    if (tail_closure) out.cost += discount * f / p.delta;
    return out;
  }
};

double policy_horizon(const McConfig& cfg, const PolicyField& policy,
                      const ModelParams& p, const CostParams& k,
                      double* f_max_out) {
  const double f_max = running_cost_bound(k, policy.max_rho());
  if (f_max_out) *f_max_out = f_max;
  return resolve_horizon(cfg, p.delta, f_max);
}

void check_start(double x0) {
  if (!(x0 > 0.0 && x0 < 1.0)) {
    throw Error(ErrorKind::Domain, "Monte Carlo start state outside (0, 1)");
  }
}

struct SampleSet {
  std::vector<double> costs;
  std::size_t clamps = 0;
  double horizon = 0.0;
  double f_max = 0.0;
};

SampleSet run_ensemble(double x0, const PolicyField& policy,
                       const ModelParams& p, const CostParams& k,
                       const McConfig& cfg) {
  cfg.validate();
  check_start(x0);
  SampleSet out;
  out.horizon = policy_horizon(cfg, policy, p, k, &out.f_max);
  const PolicyLookup lookup(policy);
  const Stepper stepper(lookup, p, k, cfg, out.horizon);

  out.costs.assign(cfg.n_paths, 0.0);
  const std::size_t batches =
      (cfg.n_paths + cfg.batch_size - 1) / cfg.batch_size;
  std::vector<std::size_t> clamps(batches, 0);
  parallel_for(batches, cfg.workers, [&](std::size_t batch) {
    auto engine = stream_engine(cfg.seed, batch);
    Normal normal;
    const std::size_t begin = batch * cfg.batch_size;
    const std::size_t end = std::min(begin + cfg.batch_size, cfg.n_paths);
    for (std::size_t j = begin; j < end; ++j) {
      auto path = path_engine(engine);
      normal.reset();
      const PathSample s = stepper.run(x0, path, normal, [](double) {});
      out.costs[j] = s.cost;
      clamps[batch] += s.clamp_count;
    }
  });
  for (std::size_t c : clamps) out.clamps += c;
  return out;
}

struct Moments {
  double mean = 0.0;
  double std_err = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  const std::size_t n = xs.size();
  m.mean = pairwise_sum(xs.data(), n) / static_cast<double>(n);
  if (n > 1) {
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
      sq[i] = (xs[i] - m.mean) * (xs[i] - m.mean);
    }
    const double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
    m.std_err = std::sqrt(var / static_cast<double>(n));
  }
  return m;
}

CostEstimate summarize(const SampleSet& s, double delta) {
  const Moments m = moments(s.costs);
  CostEstimate est;
  est.mean = m.mean;
  est.std_err = m.std_err;
  est.n_paths = s.costs.size();
  est.horizon = s.horizon;
  est.tail_bound = std::exp(-delta * s.horizon) * s.f_max / delta;
  est.clamp_count = s.clamps;
  return est;
}

}  // namespace

double pairwise_sum(const double* values, std::size_t count) {
  if (count <= 8) {
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) acc += values[i];
    return acc;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, count - half);
}

const char* to_string(Quadrature q) {
  return q == Quadrature::Trapezoidal ? "trapezoidal" : "left";
}

Quadrature quadrature_from_string(const std::string& name) {
  if (name == "left") return Quadrature::LeftEndpoint;
  if (name == "trapezoidal") return Quadrature::Trapezoidal;
  throw Error(ErrorKind::Validation, "unknown quadrature '" + name +
                                         "' (expected left or trapezoidal)");
}

void McConfig::validate() const {
  auto fail = [](const std::string& m) {
    throw Error(ErrorKind::Validation, m);
  };
  if (!(std::isfinite(dt) && dt > 0.0)) fail("mc.dt > 0 required");
  if (!std::isfinite(horizon)) fail("mc.horizon must be finite");
  if (horizon > 0.0 && dt > horizon) fail("mc.dt <= mc.horizon required");
  if (n_paths < 1) fail("mc.n_paths >= 1 required");
  if (!(clamp_eps > 0.0 && clamp_eps < 0.5)) {
    fail("mc.clamp_eps in (0, 0.5) required");
  }
  if (batch_size < 1) fail("mc.batch_size >= 1 required");
  if (!(tail_tolerance > 0.0)) fail("mc.tail_tolerance > 0 required");
  if (!(neumann_warn_fraction > 0.0)) {
    fail("mc.neumann_warn_fraction > 0 required");
  }
}

double resolve_horizon(const McConfig& cfg, double delta, double f_max) {
  double t = cfg.horizon;
  if (t <= 0.0) {
    t = 200.0;
    if (f_max > 0.0) {
      t = std::max(t, std::log(f_max / (delta * cfg.tail_tolerance)) / delta);
    }
  }
  const double steps = std::max(1.0, std::ceil(t / cfg.dt - 1e-9));
  return steps * cfg.dt;
}

PathSample simulate_path(double x0, const PolicyField& policy,
                         const ModelParams& p, const CostParams& k,
                         const McConfig& cfg, std::uint64_t stream) {
  cfg.validate();
  check_start(x0);
  const PolicyLookup lookup(policy);
  const Stepper stepper(lookup, p, k, cfg,
                        policy_horizon(cfg, policy, p, k, nullptr));
  auto engine = stream_engine(cfg.seed, stream);
  auto path = path_engine(engine);
  Normal normal;
  return stepper.run(x0, path, normal, [](double) {});
}

std::vector<double> simulate_trajectory(double x0, const PolicyField& policy,
                                        const ModelParams& p,
                                        const McConfig& cfg,
                                        std::uint64_t stream,
                                        std::size_t steps) {
  cfg.validate();
  check_start(x0);
  const CostParams zero{0.0, 0.0, 0.0, 0.0, 0.0};
  const PolicyLookup lookup(policy);
  McConfig local = cfg;
  local.horizon = static_cast<double>(steps) * cfg.dt;
  const Stepper stepper(lookup, p, zero, local, local.horizon);
  auto engine = stream_engine(cfg.seed, stream);
  auto path = path_engine(engine);
  Normal normal;
  std::vector<double> states;
  states.reserve(steps + 1);
  stepper.run(x0, path, normal, [&](double x) { states.push_back(x); });
  return states;
}

std::vector<double> sample_costs(double x0, const PolicyField& policy,
                                 const ModelParams& p, const CostParams& k,
                                 const McConfig& cfg,
                                 std::size_t* clamp_count) {
  SampleSet s = run_ensemble(x0, policy, p, k, cfg);
  if (clamp_count) *clamp_count = s.clamps;
  return std::move(s.costs);
}

CostEstimate estimate_cost(double x0, const PolicyField& policy,
                           const ModelParams& p, const CostParams& k,
                           const McConfig& cfg) {
  return summarize(run_ensemble(x0, policy, p, k, cfg), p.delta);
}

BoundaryEstimate boundary_data(const PolicyField& policy,
                               const ModelParams& p, const CostParams& k,
                               const McConfig& cfg, double x_lo, double x_hi,
                               double fd_step) {
  if (!(x_lo > 0.0 && x_lo < x_hi && x_hi < 1.0)) {
    throw Error(ErrorKind::Domain, "boundary_data: 0 < x_lo < x_hi < 1 required");
  }
  if (!(fd_step > 0.0 && fd_step < x_hi - x_lo)) {
    throw Error(ErrorKind::Domain,
                "boundary_data: finite-difference step outside (0, x_hi - x_lo)");
  }
  const SampleSet left = run_ensemble(x_lo, policy, p, k, cfg);
  const SampleSet right = run_ensemble(x_hi, policy, p, k, cfg);
  const SampleSet inner = run_ensemble(x_hi - fd_step, policy, p, k, cfg);

  std::vector<double> slopes(right.costs.size());
  for (std::size_t j = 0; j < slopes.size(); ++j) {
    slopes[j] = (right.costs[j] - inner.costs[j]) / fd_step;
  }
  const Moments slope = moments(slopes);

  BoundaryEstimate out;
  out.left = summarize(left, p.delta);
  out.right = summarize(right, p.delta);
  out.right_inner = summarize(inner, p.delta);
  out.data.dirichlet = out.left.mean;
  out.data.neumann = slope.mean;
  out.dirichlet_err = out.left.std_err;
  out.neumann_err = slope.std_err;
  out.fd_step = fd_step;
  out.tail_bound = out.left.tail_bound;
  if (out.neumann_err > cfg.neumann_warn_fraction * std::abs(slope.mean)) {
    out.neumann_noisy = true;
    std::ostringstream msg;
    msg << "Neumann estimate " << slope.mean << " has standard error "
        << out.neumann_err << " (> " << cfg.neumann_warn_fraction
        << " of its magnitude)";
    out.warning = msg.str();
  }
  return out;
}

}  // namespace sisctl
