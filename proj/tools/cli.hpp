#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "sqlaug/config.hpp"

namespace sqlaug::cli {

/// Runs one command line (args excludes the program name). Returns the exit
/// code; diagnostics go to `err` prefixed with the failing stage.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Config written by make-toy: the toy corpus paths plus hyperparameters
/// sized for a single-core desk run.
RunConfig toy_run_config(std::uint64_t seed);

}  // namespace sqlaug::cli
