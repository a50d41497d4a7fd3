#include <doctest.h>

#include <string>

#include "sisctl/config.hpp"
#include "sisctl/error.hpp"

using namespace sisctl;

namespace {

std::string error_of(const std::string& text, const std::vector<std::string>& overrides) {
  try {
    parse_config_text(text, overrides);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("shipped benchmark config gives the reference parameters") {
  const RunConfig cfg =
      parse_config(std::filesystem::path(SISCTL_SOURCE_DIR) / "configs/benchmark.json", {});
  const auto& m = cfg.base.model;
  const auto& k = cfg.base.cost;
  CHECK(m.alpha == 0.5);
  CHECK(m.beta == 0.5);
  CHECK(m.gamma == 0.15);
  CHECK(m.sigma == 0.3);
  CHECK(m.delta == 0.05);
  CHECK(k.a0 == 0.5);
  CHECK(k.aI == 5.0);
  CHECK(k.amS == 0.5);
  CHECK(k.amI == 2.5);
  CHECK(k.ar == 5.0);
  CHECK(cfg.base.grid.n == 1000);
  CHECK(cfg.base.grid.x_lo == 0.01);
  CHECK(cfg.base.grid.x_hi == 0.99);
  CHECK(cfg.base.pia.eps == 1e-4);
}

TEST_CASE("constant-cost config zeroes every cost but a0") {
  const RunConfig cfg =
      parse_config(std::filesystem::path(SISCTL_SOURCE_DIR) / "configs/constant_cost.json", {});
  CHECK(cfg.base.cost.a0 == 0.5);
  CHECK(cfg.base.cost.aI == 0.0);
  CHECK(cfg.base.cost.ar == 0.0);
}

TEST_CASE("delta=0 names the violated invariant") {
  CHECK(error_of("{}", {"delta=0"}) == "delta > 0 required");
  CHECK(error_of("{}", {"model.delta=0"}) == "delta > 0 required");
}

TEST_CASE("overrides apply in order, last one wins") {
  const RunConfig cfg = parse_config_text("{}", {"mc.seed=7", "mc.seed=42"});
  CHECK(cfg.base.pia.mc.seed == 42);
  CHECK(to_json(cfg)["mc"]["seed"] == 42);
  const RunConfig again = parse_config_text("{\"mc\": {\"seed\": 3}}", {"seed=42", "mc.seed=42"});
  CHECK(again.base.pia.mc.seed == 42);
}

TEST_CASE("file values sit between defaults and overrides") {
  const RunConfig cfg = parse_config_text(R"({"grid": {"n": 300}, "model": {"sigma": 0.4}})",
                                          {"sigma=0.6"});
  CHECK(cfg.base.grid.n == 300);
  CHECK(cfg.base.grid.x_lo == 0.01);
  CHECK(cfg.base.model.sigma == 0.6);
}

TEST_CASE("unknown keys are rejected") {
  CHECK(error_of(R"({"model": {"omega": 1}})", {}).find("model.omega") != std::string::npos);
  CHECK(error_of(R"({"extra": true})", {}).find("unknown key 'extra'") != std::string::npos);
  CHECK(error_of("{}", {"omega=1"}).find("unknown key") != std::string::npos);
  CHECK(error_of("{}", {"noequals"}).find("key=value") != std::string::npos);
  CHECK(error_of(R"({"experiments": {"suboptimal": [{"control": "eta", "value": 1, "x": 2}]}})", {})
            .find("unknown key") != std::string::npos);
}

TEST_CASE("malformed text reports line and column") {
  const std::string msg = error_of("{\n  \"model\": {\n    \"alpha\": ,\n  }\n}\n", {});
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("column") != std::string::npos);
}

TEST_CASE("type mismatches name the key") {
  CHECK(error_of("{}", {"grid.n=abc"}).find("grid.n") != std::string::npos);
  CHECK(error_of(R"({"pia": {"refresh_boundary": 1}})", {}).find("pia.refresh_boundary") !=
        std::string::npos);
}

TEST_CASE("comments are allowed") {
  CHECK_NOTHROW(parse_config_text("// note\n{ /* inline */ \"workers\": 2 }", {}));
}

TEST_CASE("experiment settings") {
  const RunConfig cfg = parse_config_text(
      R"({"experiments": {"sweep": {"parameters": ["alpha"], "values": {"alpha": [0.1, 0.2]}}}})",
      {"experiments.perturb.offsets=[0.05]", "experiments.sweep.values.ar=[1, 2]"});
  CHECK(cfg.sweep_parameters == std::vector<std::string>{"alpha"});
  CHECK(cfg.sweep_values_for("alpha") == std::vector<double>{0.1, 0.2});
  CHECK(cfg.sweep_values_for("ar") == std::vector<double>{1.0, 2.0});
  CHECK(cfg.sweep_values_for("beta") == std::vector<double>{0.25, 0.5, 0.75, 1.0});
  CHECK(cfg.perturb_offsets == std::vector<double>{0.05});
  CHECK(error_of("{}", {"experiments.sweep.parameters=[\"gamma\"]"}).find("gamma") !=
        std::string::npos);
  CHECK(error_of("{}", {"experiments.sweep.values.gamma=[1]"}).find("gamma") !=
        std::string::npos);
}

TEST_CASE("workers flow into the Monte-Carlo settings") {
  const RunConfig cfg = parse_config_text("{}", {"workers=3"});
  CHECK(cfg.workers == 3);
  CHECK(cfg.base.pia.mc.workers == 3);
  CHECK(error_of("{}", {"workers=0"}).find("workers") != std::string::npos);
}

TEST_CASE("round trip through JSON") {
  const RunConfig cfg = parse_config_text("{}", {"mode=as_printed", "quadrature=trapezoidal",
                                                 "output_dir=results/x"});
  const RunConfig back = from_json(to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
  CHECK(back.base.pia.mode == UpdateMode::AsPrinted);
  CHECK(back.output_dir == std::filesystem::path("results/x"));
}
