#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>

#include "veritas/core/design.hpp"
#include "veritas/orchestrator/executor.hpp"
#include "veritas/orchestrator/record.hpp"

namespace veritas {

struct RunOptions {
  std::uint64_t trial_cap = kDefaultTrialCap;
  // Called on the writer thread after each record is appended.
  std::function<void(const RunRecord&)> on_record;
};

struct RunSummary {
  std::uint64_t total = 0;     // trials in the design
  std::uint64_t executed = 0;  // trials run by this call
  std::uint64_t resumed = 0;   // trials already present in the archive
  std::map<TrialStatus, std::uint64_t> counts;  // over the whole archive

  bool all_ok() const;
};

// Scratch directory for per-trial files: "<archive>.work".
std::filesystem::path work_root(const std::filesystem::path& archive_path);

// Runs every trial missing from the archive and appends its record. Records
// are written in trial-index order whatever the worker count. If resuming
// left the file out of index order, its lines are reordered (bytes of each
// record unchanged) by an atomic rewrite. Existing records that disagree with
// the design raise archive_corrupt; an unwritable archive raises io_error.
RunSummary run_experiment(const ExperimentDesign& design, const ExecutorConfig& cfg,
                          const std::filesystem::path& archive_path, const RunOptions& options = {});

}  // namespace veritas
