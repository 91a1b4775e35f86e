#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kwg::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kValidationFailure = 3 };

/// Runs one subcommand. `args` excludes the program name. Output goes to
/// `out`, diagnostics to `err`; nothing is thrown.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kwg::cli
