#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace secnet::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,    ///< bad command line or invalid parameters
  kIo = 3,       ///< unreadable input or unwritable output
  kModule = 4,   ///< infeasible generation, convergence, capacity, work cap
};

/// Runs the secnet command line on `args` (argv without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace secnet::cli
