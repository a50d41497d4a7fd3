#include <doctest.h>

#include <cmath>
#include <random>

#include "sisctl/error.hpp"
#include "sisctl/model.hpp"

using namespace sisctl;

namespace {

// Grid search over the control box, the oracle for the pointwise minimizer.
double brute_min(double x, double v, double dv, double d2v,
                 const ModelParams& p, const CostParams& k, double rho_max,
                 int points) {
  double best = INFINITY;
  for (int i = 0; i < points; ++i) {
    for (int j = 0; j < points; ++j) {
      const ControlPair c{static_cast<double>(i) / (points - 1),
                          rho_max * static_cast<double>(j) / (points - 1)};
      best = std::min(best, hamiltonian(x, c, v, dv, d2v, p, k));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("drift matches hand substitution") {
  const ModelParams p;
  // 1 * 0.5 * 0.5 + 0.5 * (1 * 0.5 * 0.5 - 0.15)
  CHECK(drift(0.5, {1.0, 0.0}, p) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(std::abs(drift(1e-12, {0.0, 0.0}, p)) < 1e-12);
  CHECK(drift(1.0 - 1e-12, {0.7, 0.0}, p) == doctest::Approx(-0.15).epsilon(1e-9));
  CHECK(drift(1.0 - 1e-12, {0.0, 0.0}, p) == doctest::Approx(-0.15).epsilon(1e-9));
}

TEST_CASE("kernels reject states outside (0, 1)") {
  const ModelParams p;
  const CostParams k;
  for (double x : {0.0, 1.0, -0.1, 1.5, std::nan("")}) {
    CHECK_THROWS_AS(drift(x, {}, p), Error);
    CHECK_THROWS_AS(diffusion(x, p), Error);
    CHECK_THROWS_AS(running_cost(x, {}, k), Error);
    CHECK_THROWS_AS(update_controls(x, 1.0, p, k, UpdateMode::ExactFoc), Error);
  }
  try {
    drift(0.0, {}, p);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("diffusion values and symmetry") {
  const ModelParams p;
  CHECK(diffusion(0.5, p) == doctest::Approx(0.075));
  CHECK(diffusion(1e-9, p) < 1e-9);
  CHECK(diffusion(1.0 - 1e-9, p) < 1e-9);
  for (double x = 0.01; x < 0.5; x += 0.037) {
    CHECK(diffusion(x, p) == doctest::Approx(diffusion(1.0 - x, p)).epsilon(1e-12));
  }
}

TEST_CASE("running cost examples") {
  const CostParams k;
  CHECK(running_cost(0.5, {1.0, 0.0}, k) == doctest::Approx(3.0));
  CHECK(running_cost(0.5, {0.0, 0.0}, k) == doctest::Approx(4.5));
  CHECK(running_cost(0.5, {1.0, 2.0}, k) == doctest::Approx(13.0));
}

TEST_CASE("control updates at x = 0.5, dv = 10") {
  const ModelParams p;
  const CostParams k;
  const ControlPair printed = update_controls(0.5, 10.0, p, k, UpdateMode::AsPrinted);
  CHECK(printed.eta == 0.0);
  CHECK(printed.rho == doctest::Approx(2.0));
  // eta = (2c - alpha (1-x) dv) / (2 (c + beta x (1-x) dv)), c = 1.5.
  const ControlPair exact = update_controls(0.5, 10.0, p, k, UpdateMode::ExactFoc);
  CHECK(exact.eta == doctest::Approx(1.0 / 11.0));
  CHECK(exact.rho == doctest::Approx(1.0));
}

TEST_CASE("zero gradient gives no control") {
  const ModelParams p;
  const CostParams k;
  for (auto mode : {UpdateMode::AsPrinted, UpdateMode::ExactFoc}) {
    const ControlPair c = update_controls(0.3, 0.0, p, k, mode);
    CHECK(c.eta == 1.0);
    CHECK(c.rho == 0.0);
  }
}

TEST_CASE("zero-denominator cases") {
  const ModelParams p;
  const CostParams free_mitigation{0.5, 5.0, 0.5, 2.5, 0.0};
  CHECK(update_controls(0.5, 1.0, p, free_mitigation, UpdateMode::ExactFoc, 7.0).rho == 7.0);
  CHECK(update_controls(0.5, 1.0, p, free_mitigation, UpdateMode::AsPrinted, 7.0).rho == 7.0);
  const CostParams free_management{0.5, 5.0, 0.0, 0.0, 5.0};
  CHECK(update_controls(0.5, 1.0, p, free_management, UpdateMode::AsPrinted).eta == 0.0);
  CHECK(update_controls(0.5, -1.0, p, free_management, UpdateMode::AsPrinted).eta == 1.0);
}

TEST_CASE("hamiltonian_min at zero gradient") {
  const ModelParams p;
  const CostParams k;
  CHECK(hamiltonian_min(0.5, 0.0, 0.0, 0.0, p, k) == doctest::Approx(3.0));
}

TEST_CASE("fuzz: control ranges and minimizer optimality") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> ux(0.001, 0.999);
  std::uniform_real_distribution<double> udv(-40.0, 40.0);
  std::uniform_real_distribution<double> upar(0.0, 2.0);
  const double rho_max = 10.0;
  for (int trial = 0; trial < 2000; ++trial) {
    ModelParams p{upar(rng), upar(rng), upar(rng), upar(rng), 0.01 + upar(rng)};
    const double amS = 0.1 + upar(rng);
    CostParams k{upar(rng), upar(rng), amS, amS + upar(rng), 0.1 + upar(rng)};
    const double x = ux(rng);
    const double dv = udv(rng);
    for (auto mode : {UpdateMode::AsPrinted, UpdateMode::ExactFoc}) {
      const ControlPair c = update_controls(x, dv, p, k, mode, rho_max);
      REQUIRE(c.eta >= 0.0);
      REQUIRE(c.eta <= 1.0);
      REQUIRE(c.rho >= 0.0);
      REQUIRE(c.rho <= rho_max);
    }
    const ControlPair exact = update_controls(x, dv, p, k, UpdateMode::ExactFoc, rho_max);
    const ControlPair printed = update_controls(x, dv, p, k, UpdateMode::AsPrinted, rho_max);
    const double h_exact = hamiltonian(x, exact, 0.0, dv, 0.0, p, k);
    const double h_printed = hamiltonian(x, printed, 0.0, dv, 0.0, p, k);
    CHECK(h_exact <= h_printed + 1e-10 * (1.0 + std::abs(h_printed)));
  }
}

TEST_CASE("exact minimizer agrees with a 401 x 401 grid search") {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> ux(0.01, 0.99);
  std::uniform_real_distribution<double> udv(-30.0, 30.0);
  const ModelParams p;
  const CostParams k;
  const double rho_max = 4.0;
  for (int trial = 0; trial < 25; ++trial) {
    const double x = ux(rng);
    const double dv = udv(rng);
    const double exact = hamiltonian_min(x, 1.0, dv, 0.5, p, k, rho_max);
    const double brute = brute_min(x, 1.0, dv, 0.5, p, k, rho_max, 401);
    CHECK(exact <= brute + 1e-12);
    // Grid spacing 1/400 in eta and 0.01 in rho bounds the gap quadratically.
    CHECK(brute - exact < 1e-3);
  }
}

TEST_CASE("drift is Lipschitz with the advertised constant") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ux(0.001, 0.999);
  std::uniform_real_distribution<double> uc(0.0, 1.0);
  const ModelParams p;
  for (int trial = 0; trial < 2000; ++trial) {
    const ControlPair c{uc(rng), 5.0 * uc(rng)};
    const double x = ux(rng);
    const double y = ux(rng);
    const double L = lipschitz_constant(c, p);
    CHECK(std::abs(drift(x, c, p) - drift(y, c, p)) <= L * std::abs(x - y) + 1e-14);
    CHECK(std::abs(diffusion(x, p) - diffusion(y, p)) <= L * std::abs(x - y) + 1e-14);
  }
}

TEST_CASE("cost is nondecreasing in x and bounded by running_cost_bound") {
  const CostParams k;
  for (double eta : {0.0, 0.3, 1.0}) {
    for (double rho : {0.0, 0.7, 2.0}) {
      double prev = -INFINITY;
      for (double x = 0.005; x < 1.0; x += 0.01) {
        const double f = running_cost(x, {eta, rho}, k);
        CHECK(f >= prev);
        CHECK(f <= running_cost_bound(k, 2.0) + 1e-12);
        prev = f;
      }
    }
  }
}

TEST_CASE("parameter validation") {
  ModelParams p;
  p.delta = 0.0;
  try {
    p.validate();
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
    CHECK(std::string(e.what()) == "delta > 0 required");
  }
  p = ModelParams{};
  p.sigma = -0.1;
  CHECK_THROWS_AS(p.validate(), Error);

  CostParams k;
  CHECK(k.satisfies_standing_assumption());
  k.amI = 0.1;
  CHECK_THROWS_AS(k.validate(), Error);
  const CostParams constant{0.5, 0.0, 0.0, 0.0, 0.0};
  CHECK_NOTHROW(constant.validate());
  CHECK_FALSE(constant.satisfies_standing_assumption());
}

TEST_CASE("update mode names") {
  CHECK(update_mode_from_string("as_printed") == UpdateMode::AsPrinted);
  CHECK(update_mode_from_string("exact_foc") == UpdateMode::ExactFoc);
  CHECK(std::string(to_string(UpdateMode::ExactFoc)) == "exact_foc");
  CHECK_THROWS_AS(update_mode_from_string("newton"), Error);
}
