#pragma once

#include <stdlib.h>

#include <filesystem>
#include <string>
#include <vector>

#include "veritas/core/design.hpp"
#include "veritas/orchestrator/executor.hpp"
#include "veritas/orchestrator/record.hpp"

namespace testing_support {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "veritas-test-XXXXXX").string();
    path_ = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline veritas::VariableSpec categorical(std::string name, veritas::Role role, std::vector<std::string> levels,
                                         std::string description = "described") {
  return {std::move(name), role, veritas::VariableDomain::categorical(std::move(levels)), std::move(description)};
}

inline veritas::VariableSpec real(std::string name, veritas::Role role, std::string description = "described") {
  return {std::move(name), role, veritas::VariableDomain::real(), std::move(description)};
}

inline veritas::Hypothesis method_hypothesis(std::string id = "H1", std::string metric = "score",
                                             std::string a = "candidate", std::string b = "baseline") {
  veritas::Hypothesis h;
  h.id = std::move(id);
  h.metric = std::move(metric);
  h.group_a = {{"method", a}};
  h.group_b = {{"method", b}};
  h.statement_null = "no difference in " + h.metric;
  h.statement_alt = "the methods differ in " + h.metric;
  return h;
}

// method {baseline, candidate} x S seeds x K folds x R replications, one real
// dependent "score"; 60 trials with the defaults.
inline veritas::ExperimentDesign method_design(std::uint32_t seeds = 3, std::uint32_t folds = 5,
                                               std::uint32_t reps = 2, std::uint64_t master = 42) {
  using veritas::Role;
  veritas::ExperimentDesign d;
  d.variables = {categorical("method", Role::independent, {"baseline", "candidate"}),
                 real("score", Role::dependent)};
  d.factor_grid["method"] = {std::string("baseline"), std::string("candidate")};
  d.seed_count = seeds;
  d.cv_folds = folds;
  d.replications = reps;
  d.master_seed = master;
  d.method_factor = "method";
  d.data_items["*"] = 20;
  d.hypotheses = {method_hypothesis()};
  return d;
}

// Adds a dataset factor with the given levels to method_design.
inline veritas::ExperimentDesign method_dataset_design(std::vector<std::string> datasets, std::uint32_t seeds,
                                                       std::uint32_t folds, std::uint32_t reps,
                                                       std::uint64_t master) {
  auto d = method_design(seeds, folds, reps, master);
  d.variables.insert(d.variables.begin() + 1, categorical("dataset", veritas::Role::independent, datasets));
  std::vector<veritas::Value> levels(datasets.begin(), datasets.end());
  d.factor_grid["dataset"] = levels;
  d.dataset_factor = "dataset";
  return d;
}

inline veritas::ExecutorConfig stub_executor(std::vector<std::string> mode_args, unsigned parallelism = 1,
                                             double timeout = 30.0) {
  veritas::ExecutorConfig cfg;
  cfg.command = {VERITAS_STUB, "{input}", "{output}"};
  cfg.command.insert(cfg.command.end(), mode_args.begin(), mode_args.end());
  cfg.timeout = timeout;
  cfg.parallelism = parallelism;
  return cfg;
}

// One ok record per trial with outcomes[metric] = value(trial); no executor.
template <class F>
std::vector<veritas::RunRecord> synthetic_records(const veritas::ExperimentDesign& d, F value,
                                                  const std::string& metric = "score") {
  std::vector<veritas::RunRecord> out;
  for (const auto& t : veritas::enumerate_trials(d)) {
    veritas::RunRecord r;
    r.trial = t;
    r.outcomes[metric] = veritas::Value(static_cast<double>(value(t)));
    r.environment = {"linux", "cpu", "1", "1 GiB", "0.1.0", "stub"};
    r.started_at = "2026-01-01T00:00:00.000Z";
    r.finished_at = "2026-01-01T00:00:01.000Z";
    r.wall_time = 1.0;
    r.exit_code = 0;
    out.push_back(std::move(r));
  }
  return out;
}

inline bool is_level(const veritas::Trial& t, const std::string& factor, const std::string& level) {
  return std::get<std::string>(t.bindings_x.at(factor)) == level;
}

}  // namespace testing_support
