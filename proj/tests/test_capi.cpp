#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "sisctl/sisctl.h"

TEST_CASE("version and status strings") {
  CHECK(std::string(sisctl_version()) == "1.0.0");
  CHECK(std::string(sisctl_status_string(SISCTL_OK)) == "ok");
  CHECK(std::strlen(sisctl_status_string(SISCTL_ERR_PARSE)) > 0);
}

TEST_CASE("default parameters") {
  sisctl_model_params p;
  sisctl_cost_params k;
  sisctl_model_params_default(&p);
  sisctl_cost_params_default(&k);
  CHECK(p.alpha == 0.5);
  CHECK(p.delta == 0.05);
  CHECK(k.amI == 2.5);
  CHECK(k.ar == 5.0);
}

TEST_CASE("pointwise kernels") {
  sisctl_model_params p;
  sisctl_cost_params k;
  sisctl_model_params_default(&p);
  sisctl_cost_params_default(&k);
  double out = 0.0;
  REQUIRE(sisctl_drift(0.5, 1.0, 0.0, &p, &out) == SISCTL_OK);
  // 1 * 0.5 * 0.5 + 0.5 * (0.5 * 0.5 - 0.15)
  CHECK(out == doctest::Approx(0.3));
  REQUIRE(sisctl_diffusion(0.5, &p, &out) == SISCTL_OK);
  CHECK(out == doctest::Approx(0.075));
  REQUIRE(sisctl_running_cost(0.5, 1.0, 0.0, &k, &out) == SISCTL_OK);
  CHECK(out == doctest::Approx(0.5 + 2.5));

  CHECK(sisctl_drift(1.5, 0.0, 0.0, &p, &out) == SISCTL_ERR_DOMAIN);
  CHECK(std::string(sisctl_last_error()).find("outside") != std::string::npos);
  CHECK(sisctl_drift(0.5, 0.0, 0.0, nullptr, &out) == SISCTL_ERR_NULL_ARGUMENT);
  CHECK(sisctl_drift(0.5, 0.0, 0.0, &p, nullptr) == SISCTL_ERR_NULL_ARGUMENT);

  double eta = -1.0, rho = -1.0;
  REQUIRE(sisctl_update_controls(0.5, 10.0, &p, &k, SISCTL_MODE_EXACT_FOC, 10.0, &eta, &rho) ==
          SISCTL_OK);
  CHECK(eta == doctest::Approx(1.0 / 11.0));
  CHECK(rho == doctest::Approx(1.0));
  REQUIRE(sisctl_update_controls(0.5, 10.0, &p, &k, SISCTL_MODE_AS_PRINTED, 10.0, &eta, &rho) ==
          SISCTL_OK);
  CHECK(eta == doctest::Approx(0.0));
  CHECK(rho == doctest::Approx(2.0));
}

TEST_CASE("configuration handles") {
  sisctl_config* cfg = nullptr;
  REQUIRE(sisctl_config_default(&cfg) == SISCTL_OK);
  CHECK(sisctl_config_set(cfg, "delta=0") == SISCTL_ERR_VALIDATION);
  CHECK(std::string(sisctl_last_error()) == "delta > 0 required");
  CHECK(sisctl_config_set(cfg, "model.omega=1") == SISCTL_ERR_PARSE);
  REQUIRE(sisctl_config_set(cfg, "mc.seed=42") == SISCTL_OK);

  size_t needed = 0;
  REQUIRE(sisctl_config_to_json(cfg, nullptr, 0, &needed) == SISCTL_OK);
  REQUIRE(needed > 1);
  std::vector<char> small(4);
  CHECK(sisctl_config_to_json(cfg, small.data(), small.size(), &needed) ==
        SISCTL_ERR_BUFFER_TOO_SMALL);
  std::vector<char> buf(needed);
  REQUIRE(sisctl_config_to_json(cfg, buf.data(), buf.size(), &needed) == SISCTL_OK);
  CHECK(std::strlen(buf.data()) + 1 == needed);
  CHECK(std::string(buf.data()).find("\"seed\": 42") != std::string::npos);
  sisctl_config_free(cfg);

  const char* overrides[] = {"grid.n=80", "sigma=0.4"};
  CHECK(sisctl_config_load("/nonexistent/file.json", overrides, 2, &cfg) == SISCTL_ERR_IO);
  CHECK(sisctl_config_load(nullptr, overrides, 2, nullptr) == SISCTL_ERR_NULL_ARGUMENT);
  sisctl_config_free(nullptr);
}

TEST_CASE("solve through the handle API") {
  const char* overrides[] = {"grid.n=80", "mc.n_paths=100", "mc.batch_size=25", "mc.dt=0.02"};
  sisctl_config* cfg = nullptr;
  REQUIRE(sisctl_config_load(nullptr, overrides, 4, &cfg) == SISCTL_OK);
  sisctl_solution* s = nullptr;
  REQUIRE(sisctl_solve(cfg, &s) == SISCTL_OK);
  CHECK(sisctl_solution_size(s) == 80);
  CHECK(sisctl_solution_converged(s) == 1);
  const size_t iters = sisctl_solution_iterations(s);
  CHECK(iters >= 1);

  std::vector<double> x(80), v(80), eta(80), rho(80);
  REQUIRE(sisctl_solution_fields(s, x.data(), v.data(), eta.data(), rho.data(), 80) == SISCTL_OK);
  CHECK(x.front() == doctest::Approx(0.01));
  CHECK(x.back() == doctest::Approx(0.99));
  for (std::size_t i = 0; i < 80; ++i) {
    CHECK(std::isfinite(v[i]));
    CHECK(eta[i] >= 0.0);
    CHECK(eta[i] <= 1.0);
    CHECK(rho[i] >= 0.0);
  }
  size_t n_err = 0;
  REQUIRE(sisctl_solution_errors(s, nullptr, 0, &n_err) == SISCTL_OK);
  CHECK(n_err == iters);
  std::vector<double> errors(n_err);
  REQUIRE(sisctl_solution_errors(s, errors.data(), errors.size(), &n_err) == SISCTL_OK);
  CHECK(errors.back() < 1e-4);
  sisctl_solution_free(s);
  sisctl_config_free(cfg);
}

TEST_CASE("dispatch rejects unknown commands") {
  sisctl_config* cfg = nullptr;
  REQUIRE(sisctl_config_default(&cfg) == SISCTL_OK);
  CHECK(sisctl_dispatch("frobnicate", cfg) == 1);
  CHECK(sisctl_dispatch(nullptr, cfg) == 1);
  sisctl_config_free(cfg);
}
