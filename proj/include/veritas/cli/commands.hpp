#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace veritas::cli {

// Stable exit-code contract.
enum ExitCode : int {
  kOk = 0,
  kInvalidManifest = 1,
  kScaffoldConflict = 2,
  kTrialFailures = 3,
  kInsufficientData = 4,
  kAuditFailures = 5,
  kUsage = 64,
  kInternal = 70,
  kIoError = 74,
};

// Runs one invocation; args exclude the program name. Machine-readable
// summaries go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Files written by `init`.
inline constexpr const char* kScaffoldManifest = "veritas.json";
inline constexpr const char* kScaffoldExecutor = "executor.sh";

int cmd_init(const std::filesystem::path& dir, std::ostream& out, std::ostream& err);

}  // namespace veritas::cli
