#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "veritas/core/model.hpp"
#include "veritas/core/value.hpp"
#include "veritas/orchestrator/record.hpp"

namespace veritas {

inline constexpr std::string_view kTrialSchema = "veritas_trial_v1";

// Placeholders substituted in every command argument:
//   {input} {output} {artifacts} {seed} {trial}
struct ExecutorConfig {
  std::vector<std::string> command;
  double timeout = 3600.0;  // seconds
  std::filesystem::path working_dir = ".";
  std::map<std::string, std::string> env_overrides;
  unsigned parallelism = 1;

  // Throws invalid_argument on an empty command, timeout <= 0 or parallelism 0.
  void validate() const;
  std::string command_string() const;
};

// Parses the manifest "executor" section; a relative working_dir is taken
// relative to base_dir.
ExecutorConfig executor_from_json(const Json& j, const std::filesystem::path& base_dir);
Json executor_to_json(const ExecutorConfig& cfg);

Environment capture_environment(const ExecutorConfig& cfg);

// Paths of one trial's scratch area: <dir>/input.json, <dir>/output.json,
// <dir>/artifacts/, plus captured stdout/stderr logs.
struct TrialPaths {
  std::filesystem::path dir;

  std::filesystem::path input() const { return dir / "input.json"; }
  std::filesystem::path output() const { return dir / "output.json"; }
  std::filesystem::path artifacts() const { return dir / "artifacts"; }
  std::filesystem::path stdout_log() const { return dir / "stdout.log"; }
  std::filesystem::path stderr_log() const { return dir / "stderr.log"; }
};

// The per-trial input document handed to the executor.
Json trial_input_json(const ExperimentDesign& design, const Trial& trial, const TrialPaths& paths);

// Runs the executor once. Nonzero exit, timeout and malformed output are
// reported through RunRecord::status rather than thrown.
RunRecord execute_trial(const ExperimentDesign& design, const Trial& trial, const ExecutorConfig& cfg,
                        const TrialPaths& paths, const Environment& environment);

// Checks an executor output document against the dependent variables;
// returns the outcomes or a description of the first problem.
struct OutputCheck {
  std::map<std::string, Value> outcomes;
  std::string problem;  // empty when valid
};
OutputCheck check_outputs(const ExperimentDesign& design, const Json& doc);

std::string utc_timestamp();

}  // namespace veritas
