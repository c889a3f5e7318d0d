#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dseries::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitCap = 2,
  kExitInconclusive = 3,
};

/// Runs one command line (without the program name). JSON goes to `out`
/// unless --json names a file; diagnostics go to `err`. A run manifest is
/// written to --manifest (default dseries-manifest.json) whatever the outcome.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dseries::cli
