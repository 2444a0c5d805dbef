#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dualq::cli {

enum ExitCode { kOk = 0, kNumericFailure = 1, kUsage = 2 };

// Runs one command line (program name excluded). Reports go to out, logs and
// diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dualq::cli
