#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gls::cli {

/// Exit codes shared by every command.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kDeltaInfinity = 2,
  kNoRoot = 3,
  kIndecisiveBound = 4,
  kDegenerateFit = 5,
};

/// Runs the glsdim command line; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gls::cli
