#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "veritas/core/model.hpp"
#include "veritas/core/value.hpp"

namespace veritas {

enum class TrialStatus { ok, failed, timeout, invalid_output };

std::string_view to_string(TrialStatus s);
TrialStatus parse_trial_status(std::string_view s);

// Best-effort host description; fields that cannot be read hold "unknown".
struct Environment {
  std::string os;
  std::string cpu_model;
  std::string logical_cores;
  std::string total_memory;
  std::string harness_version;
  std::string command;

  bool operator==(const Environment&) const = default;
};

struct RunRecord {
  Trial trial;
  TrialStatus status = TrialStatus::ok;
  // One value per dependent variable when status is ok, empty otherwise.
  std::map<std::string, Value> outcomes;
  double wall_time = 0.0;  // seconds
  Environment environment;
  std::string started_at;   // ISO 8601 UTC, millisecond resolution
  std::string finished_at;
  std::string detail;       // diagnostic for non-ok records
  std::optional<int> exit_code;

  bool operator==(const RunRecord&) const = default;
};

}  // namespace veritas
