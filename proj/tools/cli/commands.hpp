#pragma once

#include <iosfwd>

#include "config.hpp"

namespace tempsep::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitNumerical = 2,
  kExitVerification = 3,
};

// Each command validates the config, writes its files under config.output and returns an
// exit code. Library errors propagate; run_guarded maps them to exit codes.
int cmd_derivs(const RunConfig& config, std::ostream& log);
int cmd_cf(const RunConfig& config, std::ostream& log);
int cmd_solve(const RunConfig& config, std::ostream& log);
int cmd_verify(const RunConfig& config, std::ostream& log);
int cmd_reproduce(const RunConfig& config, std::ostream& log);

using Command = int (*)(const RunConfig&, std::ostream&);
int run_guarded(Command command, const RunConfig& config, std::ostream& log, std::ostream& err);

}  // namespace tempsep::cli
