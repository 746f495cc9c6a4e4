#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chipletrank::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kDataError = 2,
  kInternal = 3,
};

/// Runs `chipletrank <args...>` in-process. `args` excludes the program name.
/// Errors are reported as one JSON line on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chipletrank::cli
