#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsmote::cli {

enum ExitCode { kOk = 0, kVerificationFailed = 1, kUsageError = 2 };

/// Runs one subcommand. `args` excludes the program name. Errors are written
/// to `err` as a JSON object and reported through the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tsmote::cli
