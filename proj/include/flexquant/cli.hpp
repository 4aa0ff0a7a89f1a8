#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace flexq {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitData = 3,
  kExitSolver = 4,
};

/// Runs one `flexquant` invocation. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flexq
