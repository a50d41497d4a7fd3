#include "sisctl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "sisctl/error.hpp"
#include "sisctl/serialize.hpp"
#include "sisctl/svg.hpp"

namespace sisctl {
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool same_cost(const CostParams& a, const CostParams& b) {
  return a.a0 == b.a0 && a.aI == b.aI && a.amS == b.amS && a.amI == b.amI &&
         a.ar == b.ar;
}

bool same_model(const ModelParams& a, const ModelParams& b) {
  return a.alpha == b.alpha && a.beta == b.beta && a.gamma == b.gamma &&
         a.sigma == b.sigma && a.delta == b.delta;
}

std::string kind_name(Variant::Kind kind) { return to_string(kind); }

Variant::Kind kind_from_name(const std::string& s) {
  for (auto k : {Variant::Kind::Benchmark, Variant::Kind::FixEta,
                 Variant::Kind::FixRho, Variant::Kind::Perturb,
                 Variant::Kind::Sweep}) {
    if (s == to_string(k)) return k;
  }
  throw Error(ErrorKind::Parse, "unknown variant kind '" + s + "'");
}

json variant_json(const Variant& v) {
  json j{{"kind", kind_name(v.kind)}};
  switch (v.kind) {
    case Variant::Kind::Benchmark: break;
    case Variant::Kind::FixEta:
    case Variant::Kind::FixRho: j["value"] = v.value; break;
    case Variant::Kind::Perturb:
      j["target"] = v.target;
      j["offsets"] = v.offsets;
      break;
    case Variant::Kind::Sweep:
      j["parameter"] = v.parameter;
      j["values"] = v.values;
      break;
  }
  return j;
}

Variant variant_from_json(const json& j) {
  Variant v;
  v.kind = kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("value")) j.at("value").get_to(v.value);
  if (j.contains("target")) j.at("target").get_to(v.target);
  if (j.contains("offsets")) j.at("offsets").get_to(v.offsets);
  if (j.contains("parameter")) j.at("parameter").get_to(v.parameter);
  if (j.contains("values")) j.at("values").get_to(v.values);
  return v;
}

json make_metadata(const ExperimentSpec& spec, const RunArtifact& a,
                   const json& run) {
  json spec_j{{"name", spec.name},
              {"setup", setup_json(spec.base)},
              {"variant", variant_json(spec.variant)}};
  json hashed{{"spec", spec_j}, {"run", run}};
  return json{{"experiment", a.experiment},
              {"variant", a.variant},
              {"label", a.label},
              {"spec", spec_j},
              {"run", run},
              {"config_hash", content_hash(hashed.dump())},
              {"version", kVersion}};
}

std::vector<TableRow> make_table(const ValueField& v, const PolicyField& u,
                                 const std::vector<double>& residual) {
  std::vector<TableRow> rows(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    rows[i] = {v.grid().node(i), v[i], u.eta[i], u.rho[i], residual[i]};
  }
  return rows;
}

void fill_boundary(TraceSummary& t, const BoundaryEstimate& b) {
  t.dirichlet = b.data.dirichlet;
  t.dirichlet_err = b.dirichlet_err;
  t.neumann = b.data.neumann;
  t.neumann_err = b.neumann_err;
  t.tail_bound = b.tail_bound;
  t.boundary_warning = b.warning;
}

TraceSummary summarize(const PiaResult& r, const std::vector<double>& residual,
                       double edge_fraction) {
  TraceSummary t;
  t.converged = r.converged;
  t.iterations = r.trace.iterations();
  t.errors = r.trace.errors();
  for (const auto& rec : r.trace.records) {
    t.max_residuals.push_back(rec.max_residual);
    if (rec.iteration > 0) t.sign_sums.push_back(rec.sign_sum);
  }
  t.q_hat = kNaN;
  t.r2 = kNaN;
  try {
    const RateFit fit = fit_rate(t.errors);
    t.q_hat = fit.q_hat;
    t.r2 = fit.r2;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientData) throw;
  }
  t.max_interior_residual = max_interior_residual(residual, edge_fraction);
  if (!r.trace.records.empty()) fill_boundary(t, r.trace.records.back().boundary);
  return t;
}

// PIA run packaged as an artifact. The residual column is the Bellman
// residual over the controls the run was free to choose.
RunArtifact pia_artifact(const ExperimentSpec& spec, PiaConfig cfg,
                         std::string experiment, std::string variant,
                         std::string label, const json& run_info,
                         PiaResult* solution) {
  spec.validate();
  cfg.validate();
  PiaResult r = run(spec.base.model, spec.base.cost, spec.base.grid, cfg);
  std::vector<double> residual =
      cfg.fixed.target == FixedControl::Target::None
          ? hjb_residual(r.value, spec.base.model, spec.base.cost, cfg.rho_max)
          : policy_residual(r.value, r.policy, spec.base.model,
                            spec.base.cost);
  RunArtifact a;
  a.experiment = std::move(experiment);
  a.variant = std::move(variant);
  a.label = std::move(label);
  a.table = make_table(r.value, r.policy, residual);
  a.trace = summarize(r, residual, cfg.residual_edge_fraction);
  a.used_pia = true;
  a.metadata = make_metadata(spec, a, run_info);
  if (solution) *solution = std::move(r);
  return a;
}

RunArtifact evaluation_artifact(const ExperimentSpec& spec,
                                const PolicyField& policy,
                                std::string experiment, std::string variant,
                                std::string label, const json& run_info) {
  const BaseSetup& b = spec.base;
  PolicyEvaluation ev = evaluate_policy(policy, b.model, b.cost, b.pia);
  std::vector<double> residual =
      policy_residual(ev.value, policy, b.model, b.cost);
  RunArtifact a;
  a.experiment = std::move(experiment);
  a.variant = std::move(variant);
  a.label = std::move(label);
  a.table = make_table(ev.value, policy, residual);
  a.trace.converged = true;
  a.trace.q_hat = kNaN;
  a.trace.r2 = kNaN;
  a.trace.max_interior_residual =
      max_interior_residual(residual, b.pia.residual_edge_fraction);
  fill_boundary(a.trace, ev.boundary);
  a.used_pia = false;
  a.metadata = make_metadata(spec, a, run_info);
  return a;
}

PolicyField shifted(const PolicyField& base, const std::string& target,
                    double offset, double rho_max) {
  PolicyField u = base;
  if (target == "eta") {
    for (double& e : u.eta) e = std::clamp(e + offset, 0.0, 1.0);
  } else {
    for (double& r : u.rho) r = std::clamp(r + offset, 0.0, rho_max);
  }
  return u;
}

std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
}

std::vector<std::size_t> ok_order(const SweepResult& s) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < s.runs.size(); ++i) {
    if (s.runs[i].failure.empty()) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return s.runs[a].parameter_value < s.runs[b].parameter_value;
  });
  return idx;
}

}  // namespace

const char* to_string(Variant::Kind kind) {
  switch (kind) {
    case Variant::Kind::Benchmark: return "benchmark";
    case Variant::Kind::FixEta: return "fix_eta";
    case Variant::Kind::FixRho: return "fix_rho";
    case Variant::Kind::Perturb: return "perturb";
    case Variant::Kind::Sweep: return "sweep";
  }
  return "?";
}

void BaseSetup::validate() const {
  model.validate();
  cost.validate();
  grid.validate();
  pia.validate();
}

Variant Variant::fix_eta(double v) {
  Variant out;
  out.kind = Kind::FixEta;
  out.value = v;
  return out;
}

Variant Variant::fix_rho(double v) {
  Variant out;
  out.kind = Kind::FixRho;
  out.value = v;
  return out;
}

Variant Variant::perturb(std::string target, std::vector<double> offsets) {
  Variant out;
  out.kind = Kind::Perturb;
  out.target = std::move(target);
  out.offsets = std::move(offsets);
  return out;
}

Variant Variant::sweep(std::string parameter, std::vector<double> values) {
  Variant out;
  out.kind = Kind::Sweep;
  out.parameter = std::move(parameter);
  out.values = std::move(values);
  return out;
}

void Variant::validate() const {
  switch (kind) {
    case Kind::Benchmark: break;
    case Kind::FixEta:
      if (!(value >= 0.0 && value <= 1.0)) {
        throw Error(ErrorKind::Validation, "fixed eta in [0, 1] required");
      }
      break;
    case Kind::FixRho:
      if (!(value >= 0.0 && std::isfinite(value))) {
        throw Error(ErrorKind::Validation, "fixed rho >= 0 required");
      }
      break;
    case Kind::Perturb:
      if (target != "eta" && target != "rho") {
        throw Error(ErrorKind::Validation,
                    "perturbation target must be 'eta' or 'rho'");
      }
      for (double o : offsets) {
        if (!std::isfinite(o)) {
          throw Error(ErrorKind::Validation, "perturbation offsets must be finite");
        }
      }
      break;
    case Kind::Sweep: {
      const auto& names = sweep_parameters();
      if (std::find(names.begin(), names.end(), parameter) == names.end()) {
        throw Error(ErrorKind::Validation,
                    "unknown sweep parameter '" + parameter + "'");
      }
      if (values.empty()) {
        throw Error(ErrorKind::Validation, "sweep needs at least one value");
      }
      for (double v : values) {
        if (!std::isfinite(v) || v < 0.0) {
          throw Error(ErrorKind::Validation,
                      "sweep values for " + parameter + " must be finite and >= 0");
        }
      }
      break;
    }
  }
}

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names{"alpha", "beta", "sigma", "aI",
                                              "amI",   "amS",  "ar"};
  return names;
}

double get_parameter(const BaseSetup& b, const std::string& name) {
  if (name == "alpha") return b.model.alpha;
  if (name == "beta") return b.model.beta;
  if (name == "sigma") return b.model.sigma;
  if (name == "aI") return b.cost.aI;
  if (name == "amI") return b.cost.amI;
  if (name == "amS") return b.cost.amS;
  if (name == "ar") return b.cost.ar;
  throw Error(ErrorKind::Validation, "unknown sweep parameter '" + name + "'");
}

void set_parameter(BaseSetup& b, const std::string& name, double value) {
  if (name == "alpha") b.model.alpha = value;
  else if (name == "beta") b.model.beta = value;
  else if (name == "sigma") b.model.sigma = value;
  else if (name == "aI") b.cost.aI = value;
  else if (name == "amI") b.cost.amI = value;
  else if (name == "amS") b.cost.amS = value;
  else if (name == "ar") b.cost.ar = value;
  else throw Error(ErrorKind::Validation, "unknown sweep parameter '" + name + "'");
}

std::vector<double> default_sweep_values(const BaseSetup& base,
                                         const std::string& name) {
  if (name == "sigma") return {0.1, 0.5, 1.0, 2.0};
  if (name == "ar") return {1.0, 2.5, 5.0, 7.5};
  const double v = get_parameter(base, name);
  return {0.5 * v, v, 1.5 * v, 2.0 * v};
}

std::vector<double> default_perturbation_offsets() {
  return {-0.15, -0.10, -0.05, 0.05, 0.10, 0.15};
}

void ExperimentSpec::validate() const {
  base.validate();
  variant.validate();
}

fs::path RunArtifact::stem() const {
  return fs::path(experiment) / variant / label;
}

std::vector<double> RunArtifact::column(double TableRow::*member) const {
  std::vector<double> out;
  out.reserve(table.size());
  for (const auto& row : table) out.push_back(row.*member);
  return out;
}

RunArtifact run_benchmark(const ExperimentSpec& spec, PiaResult* solution) {
  if (spec.variant.kind != Variant::Kind::Benchmark) {
    throw Error(ErrorKind::Validation, "run_benchmark needs a benchmark variant");
  }
  PiaConfig cfg = spec.base.pia;
  cfg.fixed = FixedControl::none();
  return pia_artifact(spec, cfg, "benchmark", "optimal",
                      "N=" + std::to_string(spec.base.grid.n),
                      json{{"kind", "pia"}}, solution);
}

RunArtifact run_suboptimal(const ExperimentSpec& spec) {
  PiaConfig cfg = spec.base.pia;
  std::string variant, label;
  if (spec.variant.kind == Variant::Kind::FixEta) {
    cfg.fixed = FixedControl::eta(spec.variant.value);
    variant = "fix_eta";
    label = "eta=" + format_number(spec.variant.value);
  } else if (spec.variant.kind == Variant::Kind::FixRho) {
    cfg.fixed = FixedControl::rho(spec.variant.value);
    variant = "fix_rho";
    label = "rho=" + format_number(spec.variant.value);
  } else {
    throw Error(ErrorKind::Validation,
                "run_suboptimal needs a fix_eta or fix_rho variant");
  }
  return pia_artifact(spec, cfg, "suboptimal", variant, label,
                      json{{"kind", "pia"}}, nullptr);
}

std::vector<RunArtifact> run_perturbation(const ExperimentSpec& spec,
                                          const PiaResult& base_solution) {
  if (spec.variant.kind != Variant::Kind::Perturb) {
    throw Error(ErrorKind::Validation, "run_perturbation needs a perturb variant");
  }
  spec.validate();
  const std::string& target = spec.variant.target;
  const double rho_max = spec.base.pia.rho_max;
  std::vector<double> offsets{0.0};
  for (double o : spec.variant.offsets) {
    if (o != 0.0) offsets.push_back(o);
  }
  std::vector<RunArtifact> out;
  for (double o : offsets) {
    const PolicyField u = shifted(base_solution.policy, target, o, rho_max);
    out.push_back(evaluation_artifact(
        spec, u, "perturb", target, "offset=" + format_number(o),
        json{{"kind", "perturbation"}, {"target", target}, {"offset", o}}));
  }
  return out;
}

RunArtifact run_reference_evaluation(const ExperimentSpec& spec,
                                     const PiaResult& base_solution) {
  spec.base.validate();
  return evaluation_artifact(spec, base_solution.policy, "perturb", "reference",
                             "offset=0", json{{"kind", "reference"}});
}

RunArtifact run_constant_evaluation(const ExperimentSpec& spec, ControlPair c) {
  spec.base.validate();
  const PolicyField u = PolicyField::constant(spec.base.grid, c);
  return evaluation_artifact(
      spec, u, "evaluate", "constant",
      "eta=" + format_number(c.eta) + ",rho=" + format_number(c.rho),
      json{{"kind", "constant"}, {"eta", c.eta}, {"rho", c.rho}});
}

RunArtifact run_solve(const ExperimentSpec& spec, PiaResult* solution) {
  PiaConfig cfg = spec.base.pia;
  cfg.fixed = FixedControl::none();
  return pia_artifact(spec, cfg, "solve", "optimal",
                      "N=" + std::to_string(spec.base.grid.n),
                      json{{"kind", "pia"}}, solution);
}

SweepResult run_sweep(const ExperimentSpec& spec) {
  if (spec.variant.kind != Variant::Kind::Sweep) {
    throw Error(ErrorKind::Validation, "run_sweep needs a sweep variant");
  }
  spec.validate();
  const std::string& name = spec.variant.parameter;
  SweepResult out;
  for (double value : spec.variant.values) {
    ExperimentSpec run_spec = spec;
    set_parameter(run_spec.base, name, value);
    const std::string label = name + "=" + format_number(value);
    const json info{{"kind", "sweep"}, {"parameter", name}, {"value", value}};
    RunArtifact a;
    try {
      PiaConfig cfg = run_spec.base.pia;
      cfg.fixed = FixedControl::none();
      // Metadata keeps the unmodified base; the run record names the change.
      a = pia_artifact(run_spec, cfg, "sweep", name, label, info, nullptr);
      a.metadata = make_metadata(spec, a, info);
      if (!a.trace.converged) a.failure = "not converged";
    } catch (const Error& e) {
      a.experiment = "sweep";
      a.variant = name;
      a.label = label;
      a.failure = e.what();
      a.metadata = make_metadata(spec, a, info);
    }
    a.parameter_value = value;
    if (a.failure.empty()) {
      for (const auto& row : a.table) {
        out.comparison.push_back({value, row.x, row.v, row.eta, row.rho,
                                  row.residual});
      }
    }
    out.runs.push_back(std::move(a));
  }
  return out;
}

double sweep_order_violation(const SweepResult& sweep,
                             double TableRow::*member, bool increasing) {
  const auto idx = ok_order(sweep);
  if (idx.empty()) return 0.0;
  double worst = 0.0;
  std::size_t n = sweep.runs[idx[0]].table.size();
  for (std::size_t k : idx) n = std::min(n, sweep.runs[k].table.size());
  std::vector<double> along(idx.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < idx.size(); ++k) {
      along[k] = sweep.runs[idx[k]].table[i].*member;
    }
    worst = std::max(worst, order_violation(along, increasing));
  }
  return worst;
}

double sweep_max_change(const SweepResult& sweep, double TableRow::*member) {
  const auto idx = ok_order(sweep);
  double worst = 0.0;
  for (std::size_t k = 1; k < idx.size(); ++k) {
    const auto& a = sweep.runs[idx[k - 1]].table;
    const auto& b = sweep.runs[idx[k]].table;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      worst = std::max(worst, std::abs(b[i].*member - a[i].*member));
    }
  }
  return worst;
}

double order_violation(const std::vector<double>& values, bool increasing) {
  if (values.empty()) return 0.0;
  // Compare each value with the running extreme of everything before it.
  double worst = 0.0;
  double extreme = values[0];
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (increasing) {
      worst = std::max(worst, extreme - values[i]);
      extreme = std::max(extreme, values[i]);
    } else {
      worst = std::max(worst, values[i] - extreme);
      extreme = std::min(extreme, values[i]);
    }
  }
  return worst;
}

std::vector<PerturbationCheck> check_perturbations(
    const RunArtifact& reference, const std::vector<RunArtifact>& runs,
    const Grid& grid) {
  std::vector<PerturbationCheck> out;
  double vmax = 0.0;
  for (const auto& row : reference.table) vmax = std::max(vmax, std::abs(row.v));
  const double width = grid.x_hi - grid.x_lo;
  for (const auto& r : runs) {
    PerturbationCheck c;
    c.label = r.label;
    c.offset = r.metadata.at("run").value("offset", 0.0);
    c.tolerance = 3.0 * (reference.trace.dirichlet_err + r.trace.dirichlet_err) +
                  3.0 * (reference.trace.neumann_err + r.trace.neumann_err) *
                      width +
                  1e-8 * vmax;
    c.worst_margin = std::numeric_limits<double>::infinity();
    c.identical = r.table.size() == reference.table.size();
    for (std::size_t i = 0; i < r.table.size() && i < reference.table.size();
         ++i) {
      c.worst_margin =
          std::min(c.worst_margin, r.table[i].v - reference.table[i].v);
      if (r.table[i].v != reference.table[i].v) c.identical = false;
    }
    c.pass = c.offset == 0.0 ? c.identical : c.worst_margin >= -c.tolerance;
    out.push_back(c);
  }
  return out;
}

std::vector<Check> reference_checks(const ExperimentSpec& spec,
                                    const RunArtifact& a) {
  std::vector<Check> out;
  if (!same_model(spec.base.model, ModelParams{}) ||
      !same_cost(spec.base.cost, CostParams{}) || a.table.empty()) {
    return out;
  }
  const double v_hi = a.table.back().v;
  const auto v = a.column(&TableRow::v);
  const auto [vmin, vmax] = std::minmax_element(v.begin(), v.end());
  if (a.experiment == "benchmark") {
    out.push_back({"converged within 12 iterations",
                   a.trace.converged && a.trace.iterations <= 12,
                   "iterations=" + std::to_string(a.trace.iterations)});
    out.push_back({"v(x_hi) in [23, 33]", v_hi >= 23.0 && v_hi <= 33.0,
                   "v(x_hi)=" + fmt("%.4f", v_hi)});
    std::size_t zeros = 0;
    while (zeros < a.table.size() && a.table[zeros].eta == 0.0) ++zeros;
    out.push_back({"eta* = 0 on a left segment", zeros > 0,
                   "zero nodes=" + std::to_string(zeros)});
  } else if (a.experiment == "suboptimal" && a.variant == "fix_rho" &&
             spec.variant.value == 0.0) {
    out.push_back({"v(x_hi) in [48, 62]", v_hi >= 48.0 && v_hi <= 62.0,
                   "v(x_hi)=" + fmt("%.4f", v_hi)});
  } else if (a.experiment == "suboptimal" && a.variant == "fix_eta" &&
             spec.variant.value == 1.0) {
    out.push_back({"v in [68, 87] on the grid", *vmin >= 68.0 && *vmax <= 87.0,
                   "range=[" + fmt("%.4f", *vmin) + ", " + fmt("%.4f", *vmax) +
                       "]"});
    const auto eta = a.column(&TableRow::eta);
    out.push_back({"eta identically 1",
                   std::all_of(eta.begin(), eta.end(),
                               [](double e) { return e == 1.0; }),
                   ""});
  }
  return out;
}

std::string table_csv(const std::vector<TableRow>& table) {
  std::string out = "x,v,eta,rho,residual\n";
  char buf[160];
  for (const auto& r : table) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.x, r.v,
                  r.eta, r.rho, r.residual);
    out += buf;
  }
  return out;
}

namespace {

std::vector<Panel> run_panels(const std::vector<const RunArtifact*>& runs,
                              bool with_labels) {
  Panel pv{"value", "x", "v", false, {}};
  Panel pe{"eta", "x", "eta", false, {}};
  Panel pr{"rho", "x", "rho", false, {}};
  Panel perr{"PIA error", "iteration", "error", true, {}};
  for (const RunArtifact* a : runs) {
    if (!a->failure.empty() && a->table.empty()) continue;
    const std::string label = with_labels ? a->label : "";
    const auto x = a->column(&TableRow::x);
    pv.series.push_back({label, x, a->column(&TableRow::v)});
    pe.series.push_back({label, x, a->column(&TableRow::eta)});
    pr.series.push_back({label, x, a->column(&TableRow::rho)});
    if (!a->trace.errors.empty()) {
      std::vector<double> it(a->trace.errors.size());
      std::iota(it.begin(), it.end(), 1.0);
      perr.series.push_back({label, it, a->trace.errors});
    }
  }
  std::vector<Panel> panels{pv, pe, pr};
  if (!perr.series.empty()) panels.push_back(perr);
  return panels;
}

}  // namespace

std::vector<fs::path> write_artifact(const fs::path& root,
                                     const RunArtifact& a) {
  std::vector<fs::path> files;
  if (a.table.empty()) return files;
  const fs::path stem = a.stem();
  fs::path csv = stem;
  csv += ".csv";
  fs::path svg = stem;
  svg += ".svg";
  fs::path meta = stem;
  meta += ".json";
  write_text(root / csv, table_csv(a.table));
  write_text(root / svg, render_svg(run_panels({&a}, false)));

  json trace{{"converged", a.trace.converged},
             {"iterations", a.trace.iterations},
             {"errors", a.trace.errors},
             {"max_residuals", a.trace.max_residuals},
             {"sign_sums", a.trace.sign_sums},
             {"max_interior_residual", a.trace.max_interior_residual},
             {"dirichlet", a.trace.dirichlet},
             {"dirichlet_err", a.trace.dirichlet_err},
             {"neumann", a.trace.neumann},
             {"neumann_err", a.trace.neumann_err},
             {"tail_bound", a.trace.tail_bound},
             {"used_pia", a.used_pia}};
  if (std::isfinite(a.trace.q_hat)) {
    trace["q_hat"] = a.trace.q_hat;
    trace["r2"] = a.trace.r2;
  }
  if (!a.trace.boundary_warning.empty()) {
    trace["boundary_warning"] = a.trace.boundary_warning;
  }
  json doc{{"metadata", a.metadata}, {"trace", trace}};
  if (!a.failure.empty()) doc["failure"] = a.failure;
  write_text(root / meta, doc.dump(2) + "\n");
  return {csv, svg, meta};
}

std::vector<fs::path> write_family_plot(const fs::path& root,
                                        const std::vector<RunArtifact>& runs,
                                        const fs::path& relative) {
  std::vector<const RunArtifact*> ptrs;
  for (const auto& r : runs) ptrs.push_back(&r);
  write_text(root / relative, render_svg(run_panels(ptrs, true)));
  return {relative};
}

std::vector<fs::path> write_comparison(const fs::path& root,
                                       const SweepResult& sweep,
                                       const std::string& parameter) {
  const fs::path rel = fs::path("sweep") / parameter / "comparison.csv";
  std::string text = "value,x,v,eta,rho,residual\n";
  char buf[200];
  for (const auto& row : sweep.comparison) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  row[0], row[1], row[2], row[3], row[4], row[5]);
    text += buf;
  }
  write_text(root / rel, text);
  return {rel};
}

json setup_json(const BaseSetup& b) {
  json pia = b.pia;
  return json{{"model", b.model},
              {"cost", b.cost},
              {"grid", b.grid},
              {"pia", pia},
              {"mc", b.pia.mc}};
}

BaseSetup setup_from_json(const json& j) {
  BaseSetup b;
  j.at("model").get_to(b.model);
  j.at("cost").get_to(b.cost);
  j.at("grid").get_to(b.grid);
  j.at("pia").get_to(b.pia);
  j.at("mc").get_to(b.pia.mc);
  return b;
}

RunArtifact rerun(const json& metadata) {
  ExperimentSpec spec;
  const json& sj = metadata.at("spec");
  spec.name = sj.at("name").get<std::string>();
  spec.base = setup_from_json(sj.at("setup"));
  spec.variant = variant_from_json(sj.at("variant"));
  const json& run_info = metadata.at("run");
  const std::string kind = run_info.at("kind").get<std::string>();
  const std::string experiment = metadata.at("experiment").get<std::string>();

  if (kind == "constant") {
    return run_constant_evaluation(
        spec, {run_info.at("eta").get<double>(), run_info.at("rho").get<double>()});
  }
  if (kind == "sweep") {
    ExperimentSpec one = spec;
    one.variant.values = {run_info.at("value").get<double>()};
    SweepResult s = run_sweep(one);
    // Restore the full-sweep metadata so the record compares equal.
    s.runs.front().metadata = metadata;
    return std::move(s.runs.front());
  }
  if (kind == "perturbation" || kind == "reference") {
    ExperimentSpec bench = spec;
    bench.variant = Variant::benchmark();
    PiaResult solution;
    run_benchmark(bench, &solution);
    if (kind == "reference") {
      RunArtifact a = run_reference_evaluation(spec, solution);
      a.metadata = metadata;
      return a;
    }
    ExperimentSpec one = spec;
    one.variant.offsets = {run_info.at("offset").get<double>()};
    auto runs = run_perturbation(one, solution);
    RunArtifact a = std::move(runs.back());
    a.metadata = metadata;
    return a;
  }
  if (experiment == "benchmark") return run_benchmark(spec);
  if (experiment == "solve") return run_solve(spec);
  if (experiment == "suboptimal") return run_suboptimal(spec);
  throw Error(ErrorKind::Parse, "metadata does not describe a known run");
}

}  // namespace sisctl
