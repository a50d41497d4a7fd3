#include <doctest.h>

#include <cmath>

#include "sisctl/error.hpp"
#include "sisctl/pia.hpp"

using namespace sisctl;

namespace {

PiaConfig quick_config() {
  PiaConfig cfg;
  cfg.mc.n_paths = 200;
  cfg.mc.batch_size = 25;
  cfg.mc.dt = 0.02;
  return cfg;
}

}  // namespace

TEST_CASE("constant cost converges in one iteration to a0 / delta") {
  const ModelParams p;
  const CostParams k{0.5, 0.0, 0.0, 0.0, 0.0};
  const Grid g{0.01, 0.99, 200};
  const PiaResult r = run(p, k, g, quick_config());
  CHECK(r.converged);
  CHECK(r.trace.iterations() == 1);
  for (double v : r.value.values()) CHECK(std::abs(v - 10.0) < 1e-6);
  CHECK(r.trace.records.front().iteration == 0);
  CHECK(r.trace.records.front().error == 0.0);
}

TEST_CASE("initial policy honours a fixed control") {
  const Grid g{0.01, 0.99, 20};
  const PolicyField free = initial_policy(g, FixedControl::none());
  CHECK(free.eta[3] == 0.0);
  CHECK(free.rho[3] == 0.0);
  const PolicyField fixed = initial_policy(g, FixedControl::eta(1.0));
  CHECK(fixed.eta[3] == 1.0);
  CHECK(fixed.rho[3] == 0.0);
  const PolicyField rho = initial_policy(g, FixedControl::rho(0.25));
  CHECK(rho.rho[7] == 0.25);
}

TEST_CASE("policy improvement skips the fixed branch") {
  const ModelParams p;
  const CostParams k;
  const Grid g{0.01, 0.99, 50};
  std::vector<double> vals;
  for (double x : g.nodes()) vals.push_back(20.0 + 10.0 * x);
  const ValueField v(g, vals);
  PiaConfig cfg;
  cfg.fixed = FixedControl::eta(1.0);
  const PolicyField u = improve_policy(v, p, k, cfg);
  for (std::size_t i = 0; i < g.n; ++i) {
    CHECK(u.eta[i] == 1.0);
    CHECK(u.rho[i] == doctest::Approx(1.0));  // dv / (2 ar)
  }
  cfg.fixed = FixedControl::rho(0.0);
  const PolicyField w = improve_policy(v, p, k, cfg);
  for (std::size_t i = 0; i < g.n; ++i) CHECK(w.rho[i] == 0.0);
}

TEST_CASE("edge controls ignore the boundary values") {
  const ModelParams p;
  const CostParams k;
  const Grid g{0.01, 0.99, 60};
  std::vector<double> vals;
  for (double x : g.nodes()) vals.push_back(20.0 + 8.0 * x - 2.0 * x * x);
  std::vector<double> spiked = vals;
  spiked.front() += 0.05;
  spiked.back() += 0.05;
  PiaConfig cfg;
  const PolicyField a = improve_policy(ValueField(g, vals), p, k, cfg);
  const PolicyField b = improve_policy(ValueField(g, spiked), p, k, cfg);
  CHECK(a.rho == b.rho);
  CHECK(a.eta == b.eta);
  // The extrapolated gradient is exact for a quadratic: rho = v' / (2 ar).
  CHECK(a.rho.front() == doctest::Approx((8.0 - 4.0 * 0.01) / 10.0));
  CHECK(a.rho.back() == doctest::Approx((8.0 - 4.0 * 0.99) / 10.0));
  cfg.edge_controls = EdgeControls::Gradient;
  const PolicyField c = improve_policy(ValueField(g, spiked), p, k, cfg);
  CHECK(c.rho.back() > b.rho.back() + 0.3);
  CHECK(edge_controls_from_string("gradient") == EdgeControls::Gradient);
  CHECK_THROWS_AS(edge_controls_from_string("linear"), Error);
}

TEST_CASE("fit_rate examples") {
  const RateFit half = fit_rate(std::vector<double>{1.0, 0.5, 0.25, 0.125});
  CHECK(half.q_hat == doctest::Approx(0.5));
  CHECK(half.r2 == doctest::Approx(1.0));
  CHECK(half.contracting);
  const RateFit flat = fit_rate(std::vector<double>{2.0, 2.0, 2.0});
  CHECK(flat.q_hat == doctest::Approx(1.0));
  CHECK_FALSE(flat.contracting);
  try {
    fit_rate(std::vector<double>{1.0, 0.1});
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }
  CHECK_THROWS_AS(fit_rate(std::vector<double>{1.0, 0.0, 0.1}), Error);
}

TEST_CASE("residual helpers") {
  const ModelParams p;
  const CostParams k{0.5, 0.0, 0.0, 0.0, 0.0};
  const Grid g{0.01, 0.99, 100};
  const ValueField v(g, std::vector<double>(g.n, 10.0));
  const auto res = hjb_residual(v, p, k);
  CHECK(std::isnan(res.front()));
  CHECK(std::isnan(res.back()));
  for (std::size_t i = 1; i + 1 < g.n; ++i) CHECK(std::abs(res[i]) < 1e-12);
  std::vector<double> spiky(100, 0.0);
  spiky[1] = 5.0;
  spiky[50] = 0.5;
  CHECK(max_interior_residual(spiky, 0.05) == 0.5);
  CHECK(max_interior_residual(spiky, 0.0) == 5.0);
}

TEST_CASE("cross-validation accepts the solution and rejects a shifted one") {
  const ModelParams p;
  const CostParams k{0.5, 0.0, 0.0, 0.0, 0.0};
  const Grid g{0.01, 0.99, 200};
  const PiaConfig cfg = quick_config();
  const PiaResult r = run(p, k, g, cfg);
  const std::vector<double> probes{0.2, 0.5, 0.8};
  for (const auto& c : mc_cross_validate(r.value, r.policy, p, k, cfg.mc, probes, 1e-3)) {
    CHECK(c.pass);
  }
  std::vector<double> shifted(r.value.values().begin(), r.value.values().end());
  for (double& v : shifted) v += 1.0;
  const ValueField bad(g, shifted);
  for (const auto& c : mc_cross_validate(bad, r.policy, p, k, cfg.mc, probes, 1e-3)) {
    CHECK_FALSE(c.pass);
  }
  CHECK_THROWS_AS(mc_cross_validate(r.value, r.policy, p, k, cfg.mc, {0.001}, 0.0), Error);
}

TEST_CASE("one iteration cannot meet the stopping rule on the benchmark") {
  const ModelParams p;
  const CostParams k;
  const Grid g{0.01, 0.99, 200};
  PiaConfig cfg = quick_config();
  cfg.max_iter = 1;
  const PiaResult r = run(p, k, g, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.trace.iterations() == 1);
  CHECK(r.trace.errors().size() == 1);
}

TEST_CASE("coarse benchmark run: trace bookkeeping and policy ranges") {
  const ModelParams p;
  const CostParams k;
  const Grid g{0.01, 0.99, 200};
  const PiaConfig cfg = quick_config();
  const PiaResult r = run(p, k, g, cfg);
  REQUIRE(r.converged);
  const auto errors = r.trace.errors();
  CHECK(errors.size() == r.trace.iterations());
  CHECK(errors.back() < cfg.eps);
  for (std::size_t i = 0; i < r.trace.records.size(); ++i) {
    const auto& rec = r.trace.records[i];
    CHECK(rec.iteration == static_cast<int>(i));
    CHECK(rec.value.size() == g.n);
    if (i > 0) {
      CHECK(rec.increases + rec.decreases <= g.n - 2);
      CHECK(rec.sign_sum == static_cast<long>(rec.increases) - static_cast<long>(rec.decreases));
    }
  }
  for (std::size_t i = 0; i < g.n; ++i) {
    CHECK(r.policy.eta[i] >= 0.0);
    CHECK(r.policy.eta[i] <= 1.0);
    CHECK(r.policy.rho[i] >= 0.0);
    CHECK(r.policy.rho[i] <= cfg.rho_max);
  }
  // The returned policy is the update computed from the returned value.
  const PolicyField again = improve_policy(r.value, p, k, cfg);
  CHECK(again.eta == r.policy.eta);
  CHECK(again.rho == r.policy.rho);
}

TEST_CASE("fixed-policy evaluation equals the Bellman solve under that policy") {
  const ModelParams p;
  const CostParams k;
  const Grid g{0.01, 0.99, 150};
  const PiaConfig cfg = quick_config();
  const PolicyField u = PolicyField::constant(g, {0.4, 0.6});
  const PolicyEvaluation a = evaluate_policy(u, p, k, cfg);
  const PolicyEvaluation b = evaluate_policy(u, p, k, cfg);
  CHECK(std::equal(a.value.values().begin(), a.value.values().end(), b.value.values().begin()));
  const auto res = policy_residual(a.value, u, p, k);
  double worst = 0.0;
  for (std::size_t i = 10; i + 10 < g.n; ++i) worst = std::max(worst, std::abs(res[i]));
  CHECK(worst < 0.05);
}

TEST_CASE("configuration validation") {
  PiaConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.eps = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = PiaConfig{};
  cfg.fixed = FixedControl::eta(1.5);
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = PiaConfig{};
  cfg.max_iter = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
