#pragma once

// Run configuration: a JSON document over a fixed key schema, with defaults
// for every key and dotted key=value overrides applied last.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sisctl/experiments.hpp"

namespace sisctl {

struct SuboptimalRun {
  std::string control;  // "eta" or "rho"
  double value = 0.0;
};

struct ValidationSettings {
  std::vector<double> probes{0.2, 0.5, 0.8};
  // Cross-validation allows an extra discretization_constant * h.
  double discretization_constant = 1.0;
};

struct RunConfig {
  BaseSetup base;
  std::vector<SuboptimalRun> suboptimal{{"rho", 0.0}, {"eta", 1.0}};
  std::vector<std::string> perturb_targets{"eta", "rho"};
  std::vector<double> perturb_offsets = default_perturbation_offsets();
  std::vector<std::string> sweep_parameters{"alpha", "beta", "sigma", "aI",
                                            "amI",   "amS",  "ar"};
  // Explicit sweep values; parameters without an entry use
  // default_sweep_values().
  std::map<std::string, std::vector<double>> sweep_values;
  ControlPair evaluate{1.0, 0.0};
  ValidationSettings validation;
  std::filesystem::path output_dir = "out";
  unsigned workers = 1;

  void validate() const;
  std::vector<double> sweep_values_for(const std::string& parameter) const;
};

nlohmann::json to_json(const RunConfig& cfg);
RunConfig from_json(const nlohmann::json& doc);

// Defaults as a JSON document; also the schema for unknown-key checks.
nlohmann::json default_config_json();

// Parses `text` (comments allowed), merges it over the defaults, applies the
// overrides in order and validates. Unknown keys, type mismatches and
// malformed text raise Error(Parse) naming the key or the line and column.
RunConfig parse_config_text(std::string_view text,
                            const std::vector<std::string>& overrides,
                            const std::string& source = "<config>");
RunConfig parse_config(const std::optional<std::filesystem::path>& path,
                       const std::vector<std::string>& overrides);

// Applies one "key=value" override to a JSON document. The key is a dotted
// path or a bare leaf name that occurs exactly once in the schema.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace sisctl
