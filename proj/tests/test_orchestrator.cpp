#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "support/fixtures.hpp"
#include "veritas/core/seed.hpp"
#include "veritas/error.hpp"
#include "veritas/orchestrator/executor.hpp"
#include "veritas/orchestrator/folds.hpp"
#include "veritas/orchestrator/run.hpp"
#include "veritas/provenance/archive.hpp"

namespace {

using namespace veritas;
using testing_support::method_design;
using testing_support::stub_executor;
using testing_support::TempDir;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::size_t> fold_sizes(const std::vector<std::uint32_t>& folds, std::size_t k) {
  std::vector<std::size_t> sizes(k, 0);
  for (const auto f : folds) ++sizes.at(f);
  return sizes;
}

TEST(Folds, EvenSplit) {
  const auto folds = partition_folds(10, 5, 3);
  EXPECT_EQ(fold_sizes(folds, 5), std::vector<std::size_t>(5, 2));
}

TEST(Folds, LeaveOneOut) {
  const auto folds = partition_folds(10, 10, 3);
  EXPECT_EQ(fold_sizes(folds, 10), std::vector<std::size_t>(10, 1));
}

TEST(Folds, Deterministic) {
  EXPECT_EQ(partition_folds(7, 3, 99), partition_folds(7, 3, 99));
}

TEST(Folds, SizesDifferByAtMostOne) {
  for (std::uint64_t n = 1; n <= 30; ++n) {
    for (std::uint64_t k = 1; k <= n; ++k) {
      const auto sizes = fold_sizes(partition_folds(n, k, n * 31 + k), k);
      const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
      ASSERT_LE(*hi - *lo, 1u) << n << "/" << k;
    }
  }
}

TEST(Folds, InvalidFoldCount) {
  for (const auto& [n, k] : std::vector<std::pair<int, int>>{{5, 0}, {5, 6}, {0, 1}}) {
    try {
      partition_folds(n, k, 1);
      FAIL() << n << "/" << k;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
    }
  }
}

TEST(Folds, MeasureFairOverSeeds) {
  constexpr int kSeeds = 1000;
  std::vector<std::array<int, 3>> hits(11, {0, 0, 0});
  for (int s = 0; s < kSeeds; ++s) {
    const auto folds = partition_folds(11, 3, derive_seed(2024, TrialCoords{0, std::uint64_t(s), 0, 0}));
    for (std::size_t i = 0; i < folds.size(); ++i) ++hits[i][folds[i]];
  }
  for (std::size_t i = 0; i < hits.size(); ++i) {
    for (int f = 0; f < 3; ++f) {
      EXPECT_NEAR(hits[i][f] / double(kSeeds), 1.0 / 3.0, 0.05) << "item " << i << " fold " << f;
    }
  }
}

TEST(Shuffle, EmptyAndPermutation) {
  EXPECT_TRUE(shuffle_indices(0, 1).empty());
  for (const std::uint64_t seed : {1ULL, 2ULL, 77ULL}) {
    auto p = shuffle_indices(257, seed);
    std::sort(p.begin(), p.end());
    std::vector<std::uint64_t> id(257);
    std::iota(id.begin(), id.end(), 0);
    EXPECT_EQ(p, id);
  }
}

TEST(Shuffle, DistinctSeedsDiffer) {
  EXPECT_NE(shuffle_indices(10000, 1), shuffle_indices(10000, 2));
  EXPECT_EQ(shuffle_indices(10000, 1), shuffle_indices(10000, 1));
}

TEST(Shuffle, MatchesFoldAssignment) {
  const auto perm = shuffle_indices(13, 5);
  const auto folds = partition_folds(13, 4, 5);
  const auto offset = fold_offset(4, 5);
  for (std::size_t p = 0; p < perm.size(); ++p) EXPECT_EQ(folds[perm[p]], (p + offset) % 4);
}

TEST(ExecutorConfig, Validation) {
  ExecutorConfig cfg;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.command = {"true"};
  EXPECT_NO_THROW(cfg.validate());
  cfg.timeout = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.timeout = 1;
  cfg.parallelism = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(ExecutorConfig, JsonRoundTripAndUnknownField) {
  const Json j = {{"command", {"prog", "{input}"}}, {"timeout", 5.0}, {"env", {{"A", "1"}}}, {"parallelism", 3}};
  const auto cfg = executor_from_json(j, "/base");
  EXPECT_EQ(cfg.command, (std::vector<std::string>{"prog", "{input}"}));
  EXPECT_EQ(cfg.timeout, 5.0);
  EXPECT_EQ(cfg.parallelism, 3u);
  EXPECT_EQ(cfg.env_overrides.at("A"), "1");
  EXPECT_EQ(executor_from_json(executor_to_json(cfg), "/base").command, cfg.command);
  try {
    executor_from_json({{"command", {"x"}}, {"retries", 3}}, "/base");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_manifest);
    EXPECT_NE(std::string(e.what()).find("executor.retries"), std::string::npos);
  }
}

TEST(Environment, BestEffortFieldsNeverEmpty) {
  const auto env = capture_environment(stub_executor({"exit", "0"}));
  for (const auto* f : {&env.os, &env.cpu_model, &env.logical_cores, &env.total_memory}) EXPECT_FALSE(f->empty());
  EXPECT_FALSE(env.harness_version.empty());
  EXPECT_NE(env.command.find("veritas_stub"), std::string::npos);
}

class ExecuteTrial : public ::testing::Test {
 protected:
  void SetUp() override {
    design_ = method_design(1, 2, 1);
    design_.variables.push_back({"epochs", Role::control, VariableDomain::integer(1), "epochs"});
    design_.control_bindings["epochs"] = std::int64_t{12};
    design_.variables.push_back(testing_support::categorical("label", Role::dependent, {"good", "bad"}));
    trial_ = enumerate_trials(design_).at(1);
  }

  RunRecord run(std::vector<std::string> mode, double timeout = 30.0) {
    const auto cfg = stub_executor(std::move(mode), 1, timeout);
    return execute_trial(design_, trial_, cfg, TrialPaths{tmp_ / "trial"}, capture_environment(cfg));
  }

  ExperimentDesign design_;
  Trial trial_;
  TempDir tmp_;
};

TEST_F(ExecuteTrial, InputDocumentCarriesBindingsAndFold) {
  const Json j = trial_input_json(design_, trial_, TrialPaths{tmp_ / "t"});
  EXPECT_EQ(j["schema"], kTrialSchema);
  EXPECT_EQ(j["trial"]["c"]["epochs"], 12);
  EXPECT_EQ(j["trial"]["derived_seed"], trial_.derived_seed);
  EXPECT_EQ(j["fold"]["k"], 2);
  EXPECT_EQ(j["fold"]["index"], 1);
  EXPECT_EQ(j["fold"]["test"].size(), 10u);
  EXPECT_EQ(j["fold"]["train"].size(), 10u);
  EXPECT_EQ(j["shuffle"].size(), 20u);
}

TEST_F(ExecuteTrial, EchoExecutorOk) {
  // "label" is categorical and not written by echo, so use a design without it.
  design_.variables.pop_back();
  const auto rec = run({"echo", "epochs", "score"});
  ASSERT_EQ(rec.status, TrialStatus::ok) << rec.detail;
  EXPECT_EQ(rec.outcomes.at("score"), Value(12.0));
  EXPECT_EQ(rec.exit_code, 0);
  EXPECT_EQ(rec.trial, trial_);
  EXPECT_GE(rec.wall_time, 0.0);
  EXPECT_FALSE(rec.started_at.empty());
}

TEST_F(ExecuteTrial, NonzeroExitFails) {
  const auto rec = run({"exit", "3"});
  EXPECT_EQ(rec.status, TrialStatus::failed);
  EXPECT_TRUE(rec.outcomes.empty());
  EXPECT_EQ(rec.exit_code, 3);
  EXPECT_EQ(rec.detail, "exit status 3");
}

TEST_F(ExecuteTrial, CategoricalOutsideLevelsIsInvalidOutput) {
  const auto rec = run({"raw", R"({"schema": "veritas_trial_v1", "outputs": {"score": 1.0, "label": "ugly"}})"});
  EXPECT_EQ(rec.status, TrialStatus::invalid_output);
  EXPECT_TRUE(rec.outcomes.empty());
  EXPECT_NE(rec.detail.find("label"), std::string::npos);
}

TEST_F(ExecuteTrial, MissingExtraAndMalformedOutputs) {
  EXPECT_EQ(run({"raw", R"({"schema": "veritas_trial_v1", "outputs": {"score": 1.0}})"}).status,
            TrialStatus::invalid_output);
  EXPECT_EQ(run({"raw", R"({"schema": "veritas_trial_v1", "outputs": {"score": 1.0, "label": "good", "x": 1}})"})
                .status,
            TrialStatus::invalid_output);
  EXPECT_EQ(run({"raw", R"({"schema": "veritas_trial_v1", "outputs": {"score": "high", "label": "good"}})"}).status,
            TrialStatus::invalid_output);
  EXPECT_EQ(run({"raw", "{not json"}).status, TrialStatus::invalid_output);
  EXPECT_EQ(run({"exit", "0"}).status, TrialStatus::invalid_output);
  const auto ok = run({"raw", R"({"schema": "veritas_trial_v1", "outputs": {"score": 1.5, "label": "good"}})"});
  EXPECT_EQ(ok.status, TrialStatus::ok) << ok.detail;
}

TEST_F(ExecuteTrial, TimeoutKillsExecutor) {
  const auto rec = run({"sleep", "10"}, 0.3);
  EXPECT_EQ(rec.status, TrialStatus::timeout);
  EXPECT_LT(rec.wall_time, 5.0);
  EXPECT_TRUE(rec.outcomes.empty());
}

TEST_F(ExecuteTrial, UnstartableCommandFails) {
  ExecutorConfig cfg;
  cfg.command = {"/nonexistent/program"};
  const auto rec = execute_trial(design_, trial_, cfg, TrialPaths{tmp_ / "x"}, capture_environment(cfg));
  EXPECT_EQ(rec.status, TrialStatus::failed);
}

class RunExperiment : public ::testing::Test {
 protected:
  ExperimentDesign design_ = method_design(3, 5, 2);
  ExecutorConfig cfg_ = stub_executor({"shifted", "score", "method", "candidate", "0.5", "1.0"});
  TempDir tmp_;
};

TEST_F(RunExperiment, FreshArchiveAllOk) {
  const auto path = tmp_ / "a.jsonl";
  const auto summary = run_experiment(design_, cfg_, path);
  EXPECT_EQ(summary.total, 60u);
  EXPECT_EQ(summary.executed, 60u);
  EXPECT_EQ(summary.resumed, 0u);
  EXPECT_EQ(summary.counts.at(TrialStatus::ok), 60u);
  EXPECT_TRUE(summary.all_ok());
  const auto archive = read_archive(path);
  ASSERT_EQ(archive.records.size(), 60u);
  for (std::size_t i = 0; i < 60; ++i) EXPECT_EQ(archive.records[i].trial.index, i);
}

TEST_F(RunExperiment, RerunIsIdempotent) {
  const auto path = tmp_ / "a.jsonl";
  run_experiment(design_, cfg_, path);
  const auto before = slurp(path);
  const auto summary = run_experiment(design_, cfg_, path);
  EXPECT_EQ(summary.executed, 0u);
  EXPECT_EQ(summary.resumed, 60u);
  EXPECT_EQ(slurp(path), before);
}

TEST_F(RunExperiment, ResumeCompletesExactlyTheComplement) {
  const auto full_path = tmp_ / "full.jsonl";
  run_experiment(design_, cfg_, full_path);
  const auto full = read_archive(full_path);

  for (const std::size_t keep : {0u, 1u, 17u, 59u}) {
    const auto path = tmp_ / ("part" + std::to_string(keep) + ".jsonl");
    RunArchive prefix;
    prefix.records.assign(full.records.begin(), full.records.begin() + keep);
    write_archive(path, prefix);
    std::vector<std::uint64_t> executed;
    RunOptions opts;
    opts.on_record = [&](const RunRecord& r) { executed.push_back(r.trial.index); };
    const auto summary = run_experiment(design_, cfg_, path, opts);
    EXPECT_EQ(summary.executed, 60 - keep);
    EXPECT_EQ(summary.resumed, keep);
    std::vector<std::uint64_t> expected(60 - keep);
    std::iota(expected.begin(), expected.end(), keep);
    EXPECT_EQ(executed, expected);
    EXPECT_EQ(canonical_archive(read_archive(path)), canonical_archive(full));
  }
}

TEST_F(RunExperiment, ResumeWithGapsKeepsIndexOrder) {
  const auto full_path = tmp_ / "full.jsonl";
  run_experiment(design_, cfg_, full_path);
  const auto full = read_archive(full_path);
  RunArchive sparse;
  for (const std::size_t i : {3u, 10u, 41u}) sparse.records.push_back(full.records[i]);
  const auto path = tmp_ / "sparse.jsonl";
  write_archive(path, sparse);
  const auto kept_line = record_line(full.records[10]);
  const auto summary = run_experiment(design_, cfg_, path);
  EXPECT_EQ(summary.executed, 57u);
  const auto text = slurp(path);
  EXPECT_NE(text.find(kept_line + "\n"), std::string::npos);
  const auto archive = read_archive(path);
  for (std::size_t i = 0; i < 60; ++i) EXPECT_EQ(archive.records[i].trial.index, i);
  EXPECT_EQ(canonical_archive(archive), canonical_archive(full));
}

TEST_F(RunExperiment, ParallelismDoesNotChangeCanonicalArchive) {
  const auto p1 = tmp_ / "p1.jsonl";
  const auto p8 = tmp_ / "p8.jsonl";
  run_experiment(design_, cfg_, p1);
  auto cfg8 = cfg_;
  cfg8.parallelism = 8;
  run_experiment(design_, cfg8, p8);
  EXPECT_EQ(canonical_archive(read_archive(p1)), canonical_archive(read_archive(p8)));
}

TEST_F(RunExperiment, FailuresAreRecordedNotRetried) {
  const auto path = tmp_ / "f.jsonl";
  const auto summary = run_experiment(design_, stub_executor({"exit", "1"}, 4), path);
  EXPECT_EQ(summary.counts.at(TrialStatus::failed), 60u);
  EXPECT_FALSE(summary.all_ok());
  const auto again = run_experiment(design_, cfg_, path);
  EXPECT_EQ(again.executed, 0u);
  EXPECT_EQ(again.counts.at(TrialStatus::failed), 60u);
}

TEST_F(RunExperiment, ForeignArchiveIsCorrupt) {
  const auto path = tmp_ / "a.jsonl";
  run_experiment(design_, cfg_, path);
  auto other = design_;
  other.master_seed = 43;
  try {
    run_experiment(other, cfg_, path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::archive_corrupt);
  }
}

TEST_F(RunExperiment, UnwritableArchiveIsFatal) {
  try {
    run_experiment(design_, cfg_, tmp_ / "missing-dir" / "a.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io_error);
  }
}

TEST_F(RunExperiment, ExecutorSeesHarnessFolds) {
  auto d = method_design(1, 3, 1);
  d.data_items["*"] = 10;
  d.variables[1].domain = VariableDomain::integer();
  const auto path = tmp_ / "folds.jsonl";
  run_experiment(d, stub_executor({"test-items", "score"}), path);
  std::vector<std::int64_t> sizes, expected;
  for (const auto& r : read_archive(path).records) sizes.push_back(std::get<std::int64_t>(r.outcomes.at("score")));
  const auto folds = partition_folds(10, 3, data_seed(d.master_seed, 0));
  for (int rep = 0; rep < 2; ++rep) {
    for (std::uint32_t f = 0; f < 3; ++f) expected.push_back(std::count(folds.begin(), folds.end(), f));
  }
  EXPECT_EQ(sizes, expected);
}

}  // namespace
