#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fbm::cli {

enum ExitCode : int {
    kSuccess = 0,
    kVerificationFailed = 1,
    kUsageError = 2,
    kNumericError = 3,
};

/// Runs one invocation. `args` excludes the program name. CSV goes to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace fbm::cli
