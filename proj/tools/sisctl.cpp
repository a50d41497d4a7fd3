// Command-line front end; everything goes through the C interface.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sisctl/sisctl.h"

namespace {

struct Options {
  std::string config;
  std::vector<std::string> overrides;
  std::string output;
  unsigned workers = 0;
};

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

const char* const kCommands[][2] = {
    {"solve", "Policy improvement on the configured parameters"},
    {"evaluate", "Value of the constant policy evaluate.eta, evaluate.rho"},
    {"benchmark", "Benchmark run with level checks"},
    {"suboptimal", "Runs with one control held fixed"},
    {"perturb", "Uniform shifts of the optimal policy, fixed-policy values"},
    {"sweep", "One-parameter comparative statics"},
    {"validate", "Oracle suite: closed forms, residual, Monte-Carlo probes"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal proactive/reactive controls for the stochastic SIS model"};
  app.set_version_flag("--version", sisctl_version());
  app.require_subcommand(1);

  Options opt;
  std::string command;
  for (const auto& entry : kCommands) {
    CLI::App* sub = app.add_subcommand(entry[0], entry[1]);
    sub->add_option("-c,--config", opt.config, "JSON configuration file")
        ->check(CLI::ExistingFile);
    sub->add_option("-s,--set", opt.overrides,
                    "Override key=value (dotted path or unique leaf name); repeatable")
        ->allow_extra_args(false);
    sub->add_option("-o,--output", opt.output, "Output directory");
    sub->add_option("-w,--workers", opt.workers, "Worker threads")
        ->check(CLI::PositiveNumber);
    sub->callback([&command, sub] { command = sub->get_name(); });
  }
  CLI11_PARSE(app, argc, argv);

  std::vector<std::string> overrides = opt.overrides;
  if (!opt.output.empty()) overrides.push_back("output_dir=" + json_string(opt.output));
  if (opt.workers > 0) overrides.push_back("workers=" + std::to_string(opt.workers));
  std::vector<const char*> ptrs;
  for (const auto& o : overrides) ptrs.push_back(o.c_str());

  sisctl_config* cfg = nullptr;
  const sisctl_status st = sisctl_config_load(
      opt.config.empty() ? nullptr : opt.config.c_str(), ptrs.data(), ptrs.size(), &cfg);
  if (st != SISCTL_OK) {
    std::fprintf(stderr, "error: %s: %s\n", sisctl_status_string(st), sisctl_last_error());
    return 1;
  }
  const int code = sisctl_dispatch(command.c_str(), cfg);
  sisctl_config_free(cfg);
  return code;
}
