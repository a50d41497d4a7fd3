#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "sisctl/config.hpp"

namespace sisctl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

const std::vector<std::string>& commands();

// Runs one command, writing artifacts under cfg.output_dir together with
// config.json (the effective configuration) and manifest.txt (SHA-1 and
// path of every file written). Returns 0 on success, 2 when a solve did not
// meet its stopping rule and 1 on any error or failed check.
int dispatch(const std::string& command, const RunConfig& cfg,
             std::ostream& out, std::ostream& err);

}  // namespace sisctl
