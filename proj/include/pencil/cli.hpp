#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pencil::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kViolation = 3,
  kNumericalFailure = 4,
};

/// Runs one `pencil` invocation. `args` excludes the program name.
/// Subcommands: spectrum, kernels, verify, asymptotics, validate-bc.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pencil::cli
