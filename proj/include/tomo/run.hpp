#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tomo/io.hpp"

namespace tomo {

// Executes one subcommand end to end: builds the configured pipeline
// (phantom, geometry, data, solver or study), writes all outputs under
// cfg.out_dir, and returns the written paths. Progress goes to `log`.
// Throws std::invalid_argument / std::runtime_error on validation or
// I/O failures.
std::vector<std::string> run_subcommand(const RunConfig& cfg, std::ostream& log);

}  // namespace tomo
