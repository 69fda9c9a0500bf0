#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ncdist {

enum ExitCode : int {
  kExitOk = 0,
  kExitParameterError = 1,
  kExitSuiteFailure = 2,
  kExitNotConverged = 3,
};

/// Entry point for the `ncdist` tool. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ncdist
