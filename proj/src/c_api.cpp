#include "sisctl/sisctl.h"

#include <cstring>
#include <iostream>
#include <new>
#include <string>

#include "sisctl/app.hpp"
#include "sisctl/config.hpp"
#include "sisctl/error.hpp"
#include "sisctl/experiments.hpp"

struct sisctl_config {
  sisctl::RunConfig cfg;
};

struct sisctl_solution {
  sisctl::RunArtifact artifact;
};

namespace {

thread_local std::string g_last_error;

sisctl_status code_for(sisctl::ErrorKind kind) {
  switch (kind) {
    case sisctl::ErrorKind::Domain: return SISCTL_ERR_DOMAIN;
    case sisctl::ErrorKind::Validation: return SISCTL_ERR_VALIDATION;
    case sisctl::ErrorKind::Parse: return SISCTL_ERR_PARSE;
    case sisctl::ErrorKind::Singular: return SISCTL_ERR_SINGULAR;
    case sisctl::ErrorKind::InsufficientData: return SISCTL_ERR_INSUFFICIENT_DATA;
    case sisctl::ErrorKind::Io: return SISCTL_ERR_IO;
  }
  return SISCTL_ERR_INTERNAL;
}

template <typename Fn>
sisctl_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return SISCTL_OK;
  } catch (const sisctl::Error& e) {
    g_last_error = e.what();
    return code_for(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return SISCTL_ERR_INTERNAL;
}

sisctl_status null_arg(const char* name) {
  g_last_error = std::string("null argument: ") + name;
  return SISCTL_ERR_NULL_ARGUMENT;
}

sisctl::ModelParams to_model(const sisctl_model_params& p) {
  return {p.alpha, p.beta, p.gamma, p.sigma, p.delta};
}

sisctl::CostParams to_cost(const sisctl_cost_params& k) {
  return {k.a0, k.aI, k.amS, k.amI, k.ar};
}

}  // namespace

extern "C" {

const char* sisctl_version(void) { return "1.0.0"; }

const char* sisctl_last_error(void) { return g_last_error.c_str(); }

const char* sisctl_status_string(sisctl_status status) {
  switch (status) {
    case SISCTL_OK: return "ok";
    case SISCTL_ERR_DOMAIN: return "domain error";
    case SISCTL_ERR_VALIDATION: return "validation error";
    case SISCTL_ERR_PARSE: return "parse error";
    case SISCTL_ERR_SINGULAR: return "singular system";
    case SISCTL_ERR_INSUFFICIENT_DATA: return "insufficient data";
    case SISCTL_ERR_IO: return "i/o error";
    case SISCTL_ERR_NULL_ARGUMENT: return "null argument";
    case SISCTL_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case SISCTL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void sisctl_model_params_default(sisctl_model_params* p) {
  if (!p) return;
  const sisctl::ModelParams d;
  *p = {d.alpha, d.beta, d.gamma, d.sigma, d.delta};
}

void sisctl_cost_params_default(sisctl_cost_params* k) {
  if (!k) return;
  const sisctl::CostParams d;
  *k = {d.a0, d.aI, d.amS, d.amI, d.ar};
}

sisctl_status sisctl_config_load(const char* path, const char* const* overrides,
                                 size_t n_overrides, sisctl_config** out) {
  if (!out) return null_arg("out");
  if (n_overrides && !overrides) return null_arg("overrides");
  *out = nullptr;
  return guarded([&] {
    std::vector<std::string> list;
    for (size_t i = 0; i < n_overrides; ++i) {
      if (!overrides[i]) throw sisctl::Error(sisctl::ErrorKind::Parse, "null override");
      list.emplace_back(overrides[i]);
    }
    std::optional<std::filesystem::path> p;
    if (path) p = path;
    auto* cfg = new sisctl_config{sisctl::parse_config(p, list)};
    *out = cfg;
  });
}

sisctl_status sisctl_config_default(sisctl_config** out) {
  return sisctl_config_load(nullptr, nullptr, 0, out);
}

sisctl_status sisctl_config_set(sisctl_config* cfg, const char* assignment) {
  if (!cfg) return null_arg("cfg");
  if (!assignment) return null_arg("assignment");
  return guarded([&] {
    nlohmann::json doc = sisctl::to_json(cfg->cfg);
    sisctl::apply_override(doc, assignment);
    sisctl::RunConfig next = sisctl::from_json(doc);
    next.validate();
    cfg->cfg = std::move(next);
  });
}

sisctl_status sisctl_config_to_json(const sisctl_config* cfg, char* buf,
                                    size_t capacity, size_t* needed) {
  if (!cfg) return null_arg("cfg");
  std::string text;
  const sisctl_status st = guarded([&] { text = sisctl::to_json(cfg->cfg).dump(2); });
  if (st != SISCTL_OK) return st;
  if (needed) *needed = text.size() + 1;
  if (!buf) return SISCTL_OK;
  if (capacity < text.size() + 1) {
    g_last_error = "buffer too small";
    return SISCTL_ERR_BUFFER_TOO_SMALL;
  }
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return SISCTL_OK;
}

void sisctl_config_free(sisctl_config* cfg) { delete cfg; }

int sisctl_dispatch(const char* command, const sisctl_config* cfg) {
  if (!command || !cfg) {
    null_arg(!command ? "command" : "cfg");
    std::cerr << "error: " << g_last_error << "\n";
    return sisctl::kExitError;
  }
  try {
    return sisctl::dispatch(command, cfg->cfg, std::cout, std::cerr);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    std::cerr << "error: " << e.what() << "\n";
    return sisctl::kExitError;
  }
}

sisctl_status sisctl_solve(const sisctl_config* cfg, sisctl_solution** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const sisctl::ExperimentSpec spec{"solve", cfg->cfg.base,
                                      sisctl::Variant::benchmark()};
    *out = new sisctl_solution{sisctl::run_solve(spec)};
  });
}

size_t sisctl_solution_size(const sisctl_solution* s) {
  return s ? s->artifact.table.size() : 0;
}

int sisctl_solution_converged(const sisctl_solution* s) {
  return s && s->artifact.trace.converged ? 1 : 0;
}

size_t sisctl_solution_iterations(const sisctl_solution* s) {
  return s ? s->artifact.trace.iterations : 0;
}

sisctl_status sisctl_solution_fields(const sisctl_solution* s, double* x,
                                     double* v, double* eta, double* rho,
                                     size_t capacity) {
  if (!s) return null_arg("solution");
  const auto& t = s->artifact.table;
  const size_t n = std::min(capacity, t.size());
  for (size_t i = 0; i < n; ++i) {
    if (x) x[i] = t[i].x;
    if (v) v[i] = t[i].v;
    if (eta) eta[i] = t[i].eta;
    if (rho) rho[i] = t[i].rho;
  }
  if (capacity < t.size()) {
    g_last_error = "buffer too small";
    return SISCTL_ERR_BUFFER_TOO_SMALL;
  }
  return SISCTL_OK;
}

sisctl_status sisctl_solution_errors(const sisctl_solution* s, double* errors,
                                     size_t capacity, size_t* needed) {
  if (!s) return null_arg("solution");
  const auto& e = s->artifact.trace.errors;
  if (needed) *needed = e.size();
  if (!errors) return SISCTL_OK;
  const size_t n = std::min(capacity, e.size());
  std::copy(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(n), errors);
  if (capacity < e.size()) {
    g_last_error = "buffer too small";
    return SISCTL_ERR_BUFFER_TOO_SMALL;
  }
  return SISCTL_OK;
}

void sisctl_solution_free(sisctl_solution* s) { delete s; }

sisctl_status sisctl_drift(double x, double eta, double rho,
                           const sisctl_model_params* p, double* out) {
  if (!p) return null_arg("p");
  if (!out) return null_arg("out");
  return guarded([&] { *out = sisctl::drift(x, {eta, rho}, to_model(*p)); });
}

sisctl_status sisctl_diffusion(double x, const sisctl_model_params* p,
                               double* out) {
  if (!p) return null_arg("p");
  if (!out) return null_arg("out");
  return guarded([&] { *out = sisctl::diffusion(x, to_model(*p)); });
}

sisctl_status sisctl_running_cost(double x, double eta, double rho,
                                  const sisctl_cost_params* k, double* out) {
  if (!k) return null_arg("k");
  if (!out) return null_arg("out");
  return guarded([&] { *out = sisctl::running_cost(x, {eta, rho}, to_cost(*k)); });
}

sisctl_status sisctl_update_controls(double x, double dv,
                                     const sisctl_model_params* p,
                                     const sisctl_cost_params* k,
                                     sisctl_update_mode mode, double rho_max,
                                     double* eta, double* rho) {
  if (!p) return null_arg("p");
  if (!k) return null_arg("k");
  if (!eta || !rho) return null_arg(!eta ? "eta" : "rho");
  return guarded([&] {
    const auto m = mode == SISCTL_MODE_AS_PRINTED ? sisctl::UpdateMode::AsPrinted
                                                  : sisctl::UpdateMode::ExactFoc;
    const sisctl::ControlPair c =
        sisctl::update_controls(x, dv, to_model(*p), to_cost(*k), m, rho_max);
    *eta = c.eta;
    *rho = c.rho;
  });
}

}  // extern "C"
