#pragma once

// Scripted studies built on the solver: the benchmark run, single-control
// (suboptimal) runs, uniform policy perturbations and one-parameter sweeps.
// Every run yields a RunArtifact whose metadata reproduces it exactly.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sisctl/fields.hpp"
#include "sisctl/model.hpp"
#include "sisctl/pia.hpp"

namespace sisctl {

struct BaseSetup {
  ModelParams model;
  CostParams cost;
  Grid grid;
  PiaConfig pia;

  void validate() const;
};

struct Variant {
  enum class Kind { Benchmark, FixEta, FixRho, Perturb, Sweep };
  Kind kind = Kind::Benchmark;
  double value = 0.0;            // FixEta, FixRho
  std::string target;            // Perturb: "eta" or "rho"
  std::vector<double> offsets;   // Perturb
  std::string parameter;         // Sweep
  std::vector<double> values;    // Sweep

  static Variant benchmark() { return {}; }
  static Variant fix_eta(double v);
  static Variant fix_rho(double v);
  static Variant perturb(std::string target, std::vector<double> offsets);
  static Variant sweep(std::string parameter, std::vector<double> values);

  void validate() const;
};

const char* to_string(Variant::Kind kind);

// Parameters a sweep may vary.
const std::vector<std::string>& sweep_parameters();
double get_parameter(const BaseSetup& base, const std::string& name);
void set_parameter(BaseSetup& base, const std::string& name, double value);
// Default sweep values for `name` given the benchmark setup.
std::vector<double> default_sweep_values(const BaseSetup& base,
                                         const std::string& name);
std::vector<double> default_perturbation_offsets();

struct ExperimentSpec {
  std::string name;
  BaseSetup base;
  Variant variant;

  void validate() const;
};

struct TableRow {
  double x = 0.0;
  double v = 0.0;
  double eta = 0.0;
  double rho = 0.0;
  double residual = 0.0;  // NaN at the two edge nodes
};

struct TraceSummary {
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<double> errors;
  std::vector<double> max_residuals;
  std::vector<long> sign_sums;
  double q_hat = 0.0;  // NaN when fewer than three positive errors
  double r2 = 0.0;
  double max_interior_residual = 0.0;
  double dirichlet = 0.0;
  double dirichlet_err = 0.0;
  double neumann = 0.0;
  double neumann_err = 0.0;
  double tail_bound = 0.0;
  std::string boundary_warning;
};

struct RunArtifact {
  std::string experiment;  // benchmark, suboptimal, perturb, sweep
  std::string variant;     // optimal, fix_eta, fix_rho, eta, rho, <parameter>
  std::string label;       // <param>=<value>
  double parameter_value = 0.0;
  std::vector<TableRow> table;
  TraceSummary trace;
  nlohmann::json metadata;
  bool used_pia = false;
  std::string failure;  // set when the run failed (sweeps continue past it)

  // <experiment>/<variant>/<label>
  std::filesystem::path stem() const;
  std::vector<double> column(double TableRow::*member) const;
};

// The benchmark PIA run; `solution` receives the raw solver output.
RunArtifact run_benchmark(const ExperimentSpec& spec,
                          PiaResult* solution = nullptr);
RunArtifact run_suboptimal(const ExperimentSpec& spec);
// PIA on the configured setup, without the benchmark labelling.
RunArtifact run_solve(const ExperimentSpec& spec,
                      PiaResult* solution = nullptr);
// Single fixed-policy evaluation of a constant control pair.
RunArtifact run_constant_evaluation(const ExperimentSpec& spec, ControlPair c);

// Fixed-policy evaluations of the uniformly shifted optimal policy. The
// first artifact is the null shift (offset 0); one more follows per offset.
std::vector<RunArtifact> run_perturbation(const ExperimentSpec& spec,
                                          const PiaResult& base_solution);

// Fixed-policy evaluation of the unshifted optimal policy, the baseline the
// perturbed values are compared against.
RunArtifact run_reference_evaluation(const ExperimentSpec& spec,
                                     const PiaResult& base_solution);

struct PerturbationCheck {
  std::string label;
  double offset = 0.0;
  double worst_margin = 0.0;  // min over x of v_perturbed - v_reference
  // 3 (sD_ref + sD_pert) + 3 (sN_ref + sN_pert)(x_hi - x_lo) + 1e-8 max|v|,
  // with sD, sN the boundary standard errors.
  double tolerance = 0.0;
  bool identical = false;  // bitwise equal to the reference
  // offset 0: identical; otherwise worst_margin >= -tolerance.
  bool pass = false;
};
std::vector<PerturbationCheck> check_perturbations(
    const RunArtifact& reference, const std::vector<RunArtifact>& runs,
    const Grid& grid);

struct SweepResult {
  std::vector<RunArtifact> runs;  // in the order of the sweep values
  // Joined table: columns value, x, v, eta, rho, residual.
  std::vector<std::vector<double>> comparison;
};
SweepResult run_sweep(const ExperimentSpec& spec);

// Largest pointwise breach of the ordering across the sweep runs (sorted by
// value), 0 when every pair is ordered. `increasing` selects a nondecreasing check.
// Failed runs are skipped.
double sweep_order_violation(const SweepResult& sweep,
                             double TableRow::*member, bool increasing);
// Largest pointwise |change| between consecutive successful runs.
double sweep_max_change(const SweepResult& sweep, double TableRow::*member);

// Largest breach of monotonicity along a single field: max over i < j of
// v_i - v_j (increasing) or v_j - v_i (decreasing).
double order_violation(const std::vector<double>& values, bool increasing);

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};
// Level checks for the reference parameter set (default model and cost):
// benchmark and the fix_rho=0 / fix_eta=1 runs. Empty for any other setup.
std::vector<Check> reference_checks(const ExperimentSpec& spec,
                                    const RunArtifact& artifact);

// Writers. Each returns the files it created, relative to `root`.
std::vector<std::filesystem::path> write_artifact(
    const std::filesystem::path& root, const RunArtifact& artifact);
std::vector<std::filesystem::path> write_family_plot(
    const std::filesystem::path& root, const std::vector<RunArtifact>& runs,
    const std::filesystem::path& relative);
std::vector<std::filesystem::path> write_comparison(
    const std::filesystem::path& root, const SweepResult& sweep,
    const std::string& parameter);

std::string table_csv(const std::vector<TableRow>& table);

// Rebuilds the run described by an artifact's metadata and executes it.
RunArtifact rerun(const nlohmann::json& metadata);

nlohmann::json setup_json(const BaseSetup& base);
BaseSetup setup_from_json(const nlohmann::json& j);

}  // namespace sisctl
