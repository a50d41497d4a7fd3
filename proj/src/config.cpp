#include "sisctl/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "sisctl/error.hpp"
#include "sisctl/serialize.hpp"

namespace sisctl {
namespace {

std::string join_path(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

const char* kind_of(const json& j) {
  if (j.is_null()) return "null";
  if (j.is_boolean()) return "boolean";
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_array()) return "array";
  return "object";
}

bool compatible(const json& schema, const json& value) {
  if (schema.is_null()) return value.is_null() || value.is_array();
  if (schema.is_number()) return value.is_number();
  return std::string(kind_of(schema)) == kind_of(value);
}

// Open maps: their keys are checked by validate(), not by the schema.
bool is_open_map(const std::string& path) { return path == "experiments.sweep.values"; }

void merge(json& dst, const json& src, const std::string& path) {
  if (!src.is_object()) {
    throw Error(ErrorKind::Parse, "expected an object at '" +
                                      (path.empty() ? "<root>" : path) + "'");
  }
  for (const auto& [key, value] : src.items()) {
    const std::string where = join_path(path, key);
    if (is_open_map(path)) {
      if (!value.is_null() && !value.is_array()) {
        throw Error(ErrorKind::Parse,
                    "expected an array or null for '" + where + "'");
      }
      dst[key] = value;
      continue;
    }
    if (!dst.contains(key)) {
      throw Error(ErrorKind::Parse, "unknown key '" + where + "'");
    }
    json& target = dst[key];
    if (target.is_object()) {
      merge(target, value, where);
    } else if (!compatible(target, value)) {
      throw Error(ErrorKind::Parse, "expected " + std::string(kind_of(target)) +
                                        " for '" + where + "', got " +
                                        kind_of(value));
    } else {
      target = value;
    }
  }
}

void collect_leaves(const json& j, const std::string& path,
                    std::vector<std::string>& out) {
  for (const auto& [key, value] : j.items()) {
    const std::string where = join_path(path, key);
    if (value.is_object() && !is_open_map(where)) {
      collect_leaves(value, where, out);
    } else {
      out.push_back(where);
    }
  }
}

std::string resolve_key(const json& schema, const std::string& key) {
  std::vector<std::string> leaves;
  collect_leaves(schema, "", leaves);
  if (key.find('.') != std::string::npos) {
    // Either a leaf, or an entry of an open map.
    if (std::find(leaves.begin(), leaves.end(), key) != leaves.end()) return key;
    const auto dot = key.rfind('.');
    if (is_open_map(key.substr(0, dot))) return key;
    throw Error(ErrorKind::Parse, "unknown key '" + key + "'");
  }
  std::vector<std::string> hits;
  for (const auto& leaf : leaves) {
    const auto dot = leaf.rfind('.');
    const std::string tail = dot == std::string::npos ? leaf : leaf.substr(dot + 1);
    if (tail == key) hits.push_back(leaf);
  }
  if (hits.empty()) throw Error(ErrorKind::Parse, "unknown key '" + key + "'");
  if (hits.size() > 1) {
    std::string msg = "ambiguous key '" + key + "' (";
    for (std::size_t i = 0; i < hits.size(); ++i) {
      msg += (i ? ", " : "") + hits[i];
    }
    throw Error(ErrorKind::Parse, msg + ")");
  }
  return hits.front();
}

std::string where_in(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <typename T>
T field(const json& j, const char* key, const std::string& path) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, "bad value for '" + join_path(path, key) +
                                      "': " + e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  base.validate();
  if (workers < 1) throw Error(ErrorKind::Validation, "workers >= 1 required");
  for (const auto& s : suboptimal) {
    if (s.control == "eta") {
      if (!(s.value >= 0.0 && s.value <= 1.0)) {
        throw Error(ErrorKind::Validation, "suboptimal eta in [0, 1] required");
      }
    } else if (s.control == "rho") {
      if (!(s.value >= 0.0 && s.value <= base.pia.rho_max)) {
        throw Error(ErrorKind::Validation,
                    "suboptimal rho in [0, rho_max] required");
      }
    } else {
      throw Error(ErrorKind::Validation,
                  "suboptimal control must be 'eta' or 'rho'");
    }
  }
  for (const auto& t : perturb_targets) {
    Variant::perturb(t, perturb_offsets).validate();
  }
  for (const auto& p : sweep_parameters) {
    Variant::sweep(p, sweep_values_for(p)).validate();
  }
  for (const auto& [p, values] : sweep_values) {
    const auto& names = sisctl::sweep_parameters();
    if (std::find(names.begin(), names.end(), p) == names.end()) {
      throw Error(ErrorKind::Validation, "unknown sweep parameter '" + p + "'");
    }
  }
  if (!(evaluate.eta >= 0.0 && evaluate.eta <= 1.0) ||
      !(evaluate.rho >= 0.0 && evaluate.rho <= base.pia.rho_max)) {
    throw Error(ErrorKind::Validation,
                "evaluate control outside [0, 1] x [0, rho_max]");
  }
  for (double x : validation.probes) {
    if (!(x >= base.grid.x_lo && x <= base.grid.x_hi)) {
      throw Error(ErrorKind::Validation,
                  "validation probes must lie in [x_lo, x_hi]");
    }
  }
  if (!(validation.discretization_constant >= 0.0)) {
    throw Error(ErrorKind::Validation,
                "validation.discretization_constant >= 0 required");
  }
}

std::vector<double> RunConfig::sweep_values_for(const std::string& parameter) const {
  const auto it = sweep_values.find(parameter);
  if (it != sweep_values.end() && !it->second.empty()) return it->second;
  return default_sweep_values(base, parameter);
}

json to_json(const RunConfig& cfg) {
  json subopt = json::array();
  for (const auto& s : cfg.suboptimal) {
    subopt.push_back({{"control", s.control}, {"value", s.value}});
  }
  json values = json::object();
  for (const auto& name : sweep_parameters()) {
    const auto it = cfg.sweep_values.find(name);
    values[name] = it == cfg.sweep_values.end() ? json(nullptr) : json(it->second);
  }
  json pia = cfg.base.pia;
  return json{
      {"model", cfg.base.model},
      {"cost", cfg.base.cost},
      {"grid", cfg.base.grid},
      {"pia", pia},
      {"mc", cfg.base.pia.mc},
      {"experiments",
       {{"suboptimal", subopt},
        {"perturb",
         {{"targets", cfg.perturb_targets}, {"offsets", cfg.perturb_offsets}}},
        {"sweep", {{"parameters", cfg.sweep_parameters}, {"values", values}}}}},
      {"evaluate", {{"eta", cfg.evaluate.eta}, {"rho", cfg.evaluate.rho}}},
      {"validation",
       {{"probes", cfg.validation.probes},
        {"discretization_constant", cfg.validation.discretization_constant}}},
      {"output_dir", cfg.output_dir.string()},
      {"workers", cfg.workers}};
}

RunConfig from_json(const json& doc) {
  RunConfig cfg;
  try {
    cfg.base = setup_from_json(doc);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("bad parameter value: ") + e.what());
  }
  const json& ex = doc.at("experiments");
  cfg.suboptimal.clear();
  for (const auto& s : ex.at("suboptimal")) {
    if (!s.is_object()) {
      throw Error(ErrorKind::Parse, "experiments.suboptimal entries must be objects");
    }
    for (const auto& [key, value] : s.items()) {
      if (key != "control" && key != "value") {
        throw Error(ErrorKind::Parse,
                    "unknown key 'experiments.suboptimal[]." + key + "'");
      }
    }
    cfg.suboptimal.push_back(
        {field<std::string>(s, "control", "experiments.suboptimal[]"),
         field<double>(s, "value", "experiments.suboptimal[]")});
  }
  const json& pert = ex.at("perturb");
  cfg.perturb_targets =
      field<std::vector<std::string>>(pert, "targets", "experiments.perturb");
  cfg.perturb_offsets =
      field<std::vector<double>>(pert, "offsets", "experiments.perturb");
  const json& sw = ex.at("sweep");
  cfg.sweep_parameters =
      field<std::vector<std::string>>(sw, "parameters", "experiments.sweep");
  for (const auto& [key, value] : sw.at("values").items()) {
    if (value.is_null()) continue;
    cfg.sweep_values[key] =
        field<std::vector<double>>(sw.at("values"), key.c_str(),
                                   "experiments.sweep.values");
  }
  const json& ev = doc.at("evaluate");
  cfg.evaluate = {field<double>(ev, "eta", "evaluate"),
                  field<double>(ev, "rho", "evaluate")};
  const json& va = doc.at("validation");
  cfg.validation.probes = field<std::vector<double>>(va, "probes", "validation");
  cfg.validation.discretization_constant =
      field<double>(va, "discretization_constant", "validation");
  cfg.output_dir = field<std::string>(doc, "output_dir", "");
  const auto workers = field<long long>(doc, "workers", "");
  if (workers < 1) throw Error(ErrorKind::Validation, "workers >= 1 required");
  cfg.workers = static_cast<unsigned>(workers);
  cfg.base.pia.mc.workers = cfg.workers;
  return cfg;
}

json default_config_json() { return to_json(RunConfig{}); }

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorKind::Parse,
                "override '" + assignment + "' is not of the form key=value");
  }
  const std::string key = resolve_key(doc, assignment.substr(0, eq));
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  // Build {"a": {"b": value}} and merge it so the usual type checks apply.
  json patch = value;
  std::string rest = key;
  std::vector<std::string> parts;
  std::stringstream ss(rest);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    patch = json{{*it, patch}};
  }
  merge(doc, patch, "");
}

RunConfig parse_config_text(std::string_view text,
                            const std::vector<std::string>& overrides,
                            const std::string& source) {
  json doc = default_config_json();
  json user;
  try {
    user = json::parse(text.begin(), text.end(), nullptr, true,
                       /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, source + ": parse error at " +
                                      where_in(text, e.byte) + ": " + e.what());
  }
  if (!user.is_null()) merge(doc, user, "");
  for (const auto& o : overrides) apply_override(doc, o);
  RunConfig cfg = from_json(doc);
  cfg.validate();
  return cfg;
}

RunConfig parse_config(const std::optional<std::filesystem::path>& path,
                       const std::vector<std::string>& overrides) {
  if (!path) return parse_config_text("{}", overrides, "<defaults>");
  std::ifstream in(*path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read config " + path->string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides, path->string());
}

}  // namespace sisctl
