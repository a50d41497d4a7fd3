#include "sisctl/app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "sisctl/error.hpp"
#include "sisctl/serialize.hpp"
#include "sisctl/validation.hpp"

namespace sisctl {
namespace fs = std::filesystem;

namespace {

constexpr double kDirectionBand = 1e-3;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Session {
 public:
  Session(const RunConfig& cfg, std::ostream& out, std::ostream& err)
      : cfg_(cfg), out_(out), err_(err), root_(cfg.output_dir) {}

  const RunConfig& cfg() const { return cfg_; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }
  const fs::path& root() const { return root_; }

  void echo_config() {
    fs::create_directories(root_);
    const fs::path rel = "config.json";
    std::ofstream f(root_ / rel, std::ios::binary);
    f << to_json(cfg_).dump(2) << "\n";
    if (!f) throw Error(ErrorKind::Io, "cannot write " + (root_ / rel).string());
    files_.push_back(rel);
  }

  void add(const std::vector<fs::path>& files) {
    files_.insert(files_.end(), files.begin(), files.end());
  }

  void write(const RunArtifact& a) { add(write_artifact(root_, a)); }

  void write_manifest() {
    std::vector<std::string> names;
    for (const auto& f : files_) names.push_back(f.generic_string());
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    std::ofstream m(root_ / "manifest.txt", std::ios::binary);
    for (const auto& n : names) {
      m << content_hash(read_file(root_ / n)) << "  " << n << "\n";
    }
    if (!m) throw Error(ErrorKind::Io, "cannot write manifest.txt");
  }

  void report(const RunArtifact& a) {
    out_ << a.stem().generic_string() << ": ";
    if (!a.failure.empty() && a.table.empty()) {
      out_ << "FAILED (" << a.failure << ")\n";
      return;
    }
    const double v_lo = a.table.front().v;
    const double v_hi = a.table.back().v;
    out_ << "v(x_lo)=" << fmt("%.4f", v_lo) << " v(x_hi)=" << fmt("%.4f", v_hi);
    if (a.used_pia) {
      out_ << " iterations=" << a.trace.iterations
           << (a.trace.converged ? " converged" : " NOT converged");
      if (!a.trace.errors.empty()) {
        out_ << " last_error=" << fmt("%.3g", a.trace.errors.back());
      }
      if (std::isfinite(a.trace.q_hat)) out_ << " q_hat=" << fmt("%.3g", a.trace.q_hat);
    }
    out_ << " max_residual=" << fmt("%.3g", a.trace.max_interior_residual) << "\n";
    if (!a.trace.boundary_warning.empty()) {
      err_ << "warning: " << a.trace.boundary_warning << "\n";
    }
  }

  // Prints the checks and records any failure.
  void checks(const std::vector<Check>& list) {
    for (const auto& c : list) {
      out_ << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name;
      if (!c.detail.empty()) out_ << " (" << c.detail << ")";
      out_ << "\n";
      if (!c.pass) failed_ = true;
    }
  }

  void not_converged() { not_converged_ = true; }
  void fail() { failed_ = true; }

  int status() const {
    if (failed_) return kExitError;
    if (not_converged_) return kExitNotConverged;
    return kExitOk;
  }

 private:
  const RunConfig& cfg_;
  std::ostream& out_;
  std::ostream& err_;
  fs::path root_;
  std::vector<fs::path> files_;
  bool failed_ = false;
  bool not_converged_ = false;
};

ExperimentSpec spec_for(const RunConfig& cfg, std::string name, Variant v) {
  return ExperimentSpec{std::move(name), cfg.base, std::move(v)};
}

void note_convergence(Session& s, const RunArtifact& a) {
  if (a.used_pia && !a.trace.converged) s.not_converged();
}

void cmd_solve(Session& s) {
  const RunArtifact a = run_solve(spec_for(s.cfg(), "solve", Variant::benchmark()));
  s.write(a);
  s.report(a);
  note_convergence(s, a);
}

void cmd_evaluate(Session& s) {
  const RunArtifact a = run_constant_evaluation(
      spec_for(s.cfg(), "evaluate", Variant::benchmark()), s.cfg().evaluate);
  s.write(a);
  s.report(a);
}

void cmd_benchmark(Session& s) {
  const ExperimentSpec spec = spec_for(s.cfg(), "benchmark", Variant::benchmark());
  const RunArtifact a = run_benchmark(spec);
  s.write(a);
  s.report(a);
  s.checks(reference_checks(spec, a));
  note_convergence(s, a);
}

void cmd_suboptimal(Session& s) {
  std::map<std::string, std::vector<RunArtifact>> families;
  for (const auto& run : s.cfg().suboptimal) {
    const Variant v = run.control == "eta" ? Variant::fix_eta(run.value)
                                           : Variant::fix_rho(run.value);
    const ExperimentSpec spec = spec_for(s.cfg(), "suboptimal", v);
    RunArtifact a = run_suboptimal(spec);
    s.write(a);
    s.report(a);
    s.checks(reference_checks(spec, a));
    note_convergence(s, a);
    families[a.variant].push_back(std::move(a));
  }
  for (const auto& [variant, runs] : families) {
    s.add(write_family_plot(s.root(), runs,
                            fs::path("suboptimal") / variant / "family.svg"));
  }
}

void cmd_perturb(Session& s) {
  const ExperimentSpec bench = spec_for(s.cfg(), "benchmark", Variant::benchmark());
  PiaResult solution;
  const RunArtifact base = run_benchmark(bench, &solution);
  s.write(base);
  s.report(base);
  if (!base.trace.converged) {
    s.err() << "error: benchmark did not converge; perturbations need a "
               "converged solution\n";
    s.not_converged();
    return;
  }
  const RunArtifact reference = run_reference_evaluation(
      spec_for(s.cfg(), "perturb", Variant::perturb("eta", {})), solution);
  s.write(reference);
  s.report(reference);
  for (const auto& target : s.cfg().perturb_targets) {
    const ExperimentSpec spec = spec_for(
        s.cfg(), "perturb", Variant::perturb(target, s.cfg().perturb_offsets));
    const auto runs = run_perturbation(spec, solution);
    std::vector<Check> list;
    for (const auto& a : runs) {
      s.write(a);
      s.report(a);
    }
    for (const auto& c : check_perturbations(reference, runs, s.cfg().base.grid)) {
      list.push_back({c.offset == 0.0 ? target + " offset 0 reproduces the reference"
                                      : target + " " + c.label + " not below reference",
                      c.pass,
                      "min(v_pert - v_ref)=" + fmt("%.3g", c.worst_margin) +
                          " tol=" + fmt("%.3g", c.tolerance)});
    }
    s.checks(list);
    std::vector<RunArtifact> family{reference};
    family.insert(family.end(), runs.begin(), runs.end());
    s.add(write_family_plot(s.root(), family,
                            fs::path("perturb") / target / "family.svg"));
  }
}

bool reference_setup(const RunConfig& cfg) {
  const ModelParams p;
  const CostParams k;
  const auto& m = cfg.base.model;
  const auto& c = cfg.base.cost;
  return m.alpha == p.alpha && m.beta == p.beta && m.gamma == p.gamma &&
         m.sigma == p.sigma && m.delta == p.delta && c.a0 == k.a0 &&
         c.aI == k.aI && c.amS == k.amS && c.amI == k.amI && c.ar == k.ar;
}

Check direction(const SweepResult& sw, const std::string& parameter,
                double TableRow::*member, const char* control, bool increasing) {
  const double v = sweep_order_violation(sw, member, increasing);
  return {parameter + " up => " + control + (increasing ? " nondecreasing" : " nonincreasing"),
          v <= kDirectionBand, "max violation=" + fmt("%.3g", v)};
}

void cmd_sweep(Session& s) {
  std::map<std::string, double> change;
  for (const auto& parameter : s.cfg().sweep_parameters) {
    const ExperimentSpec spec = spec_for(
        s.cfg(), "sweep",
        Variant::sweep(parameter, s.cfg().sweep_values_for(parameter)));
    const SweepResult sw = run_sweep(spec);
    for (const auto& a : sw.runs) {
      s.write(a);
      s.report(a);
      if (!a.failure.empty()) {
        if (a.table.empty()) s.fail();
        else s.not_converged();
      }
    }
    s.add(write_comparison(s.root(), sw, parameter));
    s.add(write_family_plot(s.root(), sw.runs,
                            fs::path("sweep") / parameter / "family.svg"));
    change[parameter] = std::max(sweep_max_change(sw, &TableRow::eta),
                                 sweep_max_change(sw, &TableRow::rho));
    if (!reference_setup(s.cfg())) continue;
    std::vector<Check> list;
    if (parameter == "alpha") {
      list.push_back(direction(sw, parameter, &TableRow::eta, "eta*", false));
      list.push_back(direction(sw, parameter, &TableRow::rho, "rho*", true));
    } else if (parameter == "ar") {
      list.push_back(direction(sw, parameter, &TableRow::rho, "rho*", false));
    } else if (parameter == "amI") {
      list.push_back(direction(sw, parameter, &TableRow::eta, "eta*", true));
    } else if (parameter == "beta") {
      list.push_back(direction(sw, parameter, &TableRow::rho, "rho*", true));
    }
    s.checks(list);
  }
  if (reference_setup(s.cfg()) && change.count("sigma") && change.count("alpha")) {
    s.checks({{"sigma changes smaller than alpha changes",
               change["sigma"] <= change["alpha"],
               "sigma=" + fmt("%.3g", change["sigma"]) +
                   " alpha=" + fmt("%.3g", change["alpha"])}});
  }
}

void cmd_validate(Session& s) {
  std::vector<Check> list;
  for (const auto& r : run_oracles(s.cfg())) list.push_back({r.name, r.pass, r.detail});
  s.out() << "oracle checks:\n";
  s.checks(list);
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{
      "solve", "evaluate", "benchmark", "suboptimal", "perturb", "sweep", "validate"};
  return names;
}

int dispatch(const std::string& command, const RunConfig& cfg, std::ostream& out,
             std::ostream& err) {
  Session s(cfg, out, err);
  try {
    cfg.validate();
    s.echo_config();
    if (command == "solve") cmd_solve(s);
    else if (command == "evaluate") cmd_evaluate(s);
    else if (command == "benchmark") cmd_benchmark(s);
    else if (command == "suboptimal") cmd_suboptimal(s);
    else if (command == "perturb") cmd_perturb(s);
    else if (command == "sweep") cmd_sweep(s);
    else if (command == "validate") cmd_validate(s);
    else throw Error(ErrorKind::Validation, "unknown command '" + command + "'");
    s.write_manifest();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  if (s.status() == kExitNotConverged) {
    err << "stopping rule not met within pia.max_iter iterations\n";
  }
  return s.status();
}

}  // namespace sisctl
