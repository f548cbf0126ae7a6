#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace drs::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIo = 2,
  kNotConverged = 3,
  kVerifyFailed = 4,
};

/// Entry point shared by the binary and the tests. argv[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "v1,v2,...", "lo:hi:n" (inclusive linear) or "log:lo:hi:n".
std::vector<double> parse_grid(const std::string& text);

}  // namespace drs::cli
