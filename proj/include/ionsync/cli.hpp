#pragma once

#include <ostream>

#include "ionsync/config.hpp"
#include "ionsync/model.hpp"

namespace ionsync {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitFailure = 2 };

/// Full command line: parse, run, emit. Never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Runs an already validated configuration. Throws ConfigError for
/// inconsistent values, SolverError / std::runtime_error on failures.
/// Returns kExitFailure when some point did not converge.
int run_config(const RunConfig& config, std::ostream& out, bool timestamps = false);

/// Model parameters a configuration describes (working-point defaults).
ModelParams resolve_params(const RunConfig& config);

}  // namespace ionsync
