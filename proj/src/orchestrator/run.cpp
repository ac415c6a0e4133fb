#include "veritas/orchestrator/run.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "veritas/error.hpp"
#include "veritas/provenance/archive.hpp"

namespace veritas {

namespace fs = std::filesystem;

bool RunSummary::all_ok() const {
  for (const auto& [status, n] : counts) {
    if (status != TrialStatus::ok && n > 0) return false;
  }
  return true;
}

fs::path work_root(const fs::path& archive_path) { return fs::path(archive_path.string() + ".work"); }

namespace {

void reorder_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<std::pair<std::uint64_t, std::string>> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.emplace_back(Json::parse(line).at("index").get<std::uint64_t>(), line);
  }
  in.close();
  std::stable_sort(lines.begin(), lines.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    for (const auto& [index, text] : lines) out << text << '\n';
    if (!out.flush()) throw Error(ErrorKind::io_error, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

RunSummary run_experiment(const ExperimentDesign& design, const ExecutorConfig& cfg, const fs::path& archive_path,
                          const RunOptions& options) {
  cfg.validate();
  if (const auto violations = validate_design(design); !violations.empty()) {
    throw Error(ErrorKind::invalid_manifest, violations.front().path + ": " + violations.front().message);
  }
  const auto trials = enumerate_trials(design, options.trial_cap);

  RunArchive existing;
  if (fs::exists(archive_path)) existing = read_archive(archive_path);
  std::vector<bool> done(trials.size(), false);
  bool file_sorted = true;
  std::uint64_t max_done = 0;
  for (std::size_t i = 0; i < existing.records.size(); ++i) {
    const auto& trial = existing.records[i].trial;
    if (trial.index >= trials.size() || !(trial == trials[trial.index])) {
      throw Error(ErrorKind::archive_corrupt, archive_path.string() + " line " + std::to_string(i + 1) +
                                                  ": record for trial " + std::to_string(trial.index) +
                                                  " does not match the manifest");
    }
    if (i > 0 && trial.index < existing.records[i - 1].trial.index) file_sorted = false;
    done[trial.index] = true;
    max_done = std::max(max_done, trial.index);
  }

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (!done[i]) pending.push_back(i);
  }
  const bool reorder = !file_sorted || (!pending.empty() && !existing.records.empty() && pending.front() < max_done);

  std::ofstream out(archive_path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorKind::io_error, "cannot open archive " + archive_path.string() + " for writing");

  const Environment environment = capture_environment(cfg);
  const fs::path root = work_root(archive_path);

  std::mutex mutex;
  std::condition_variable ready_cv;
  std::map<std::size_t, RunRecord> ready;  // reorder buffer keyed by position in `pending`
  std::exception_ptr failure;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t pos = next.fetch_add(1);
      if (pos >= pending.size() || stop.load()) return;
      const Trial& trial = trials[pending[pos]];
      try {
        RunRecord rec = execute_trial(design, trial, cfg, TrialPaths{root / ("trial-" + std::to_string(trial.index))},
                                      environment);
        std::lock_guard lock(mutex);
        ready.emplace(pos, std::move(rec));
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        stop.store(true);
      }
      ready_cv.notify_all();
    }
  };

  const std::size_t n_workers = std::min<std::size_t>(cfg.parallelism, pending.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);

  RunArchive fresh;
  for (std::size_t pos = 0; pos < pending.size(); ++pos) {
    RunRecord rec;
    {
      std::unique_lock lock(mutex);
      ready_cv.wait(lock, [&] { return ready.contains(pos) || failure; });
      if (failure) break;
      rec = std::move(ready.at(pos));
      ready.erase(pos);
    }
    out << record_line(rec) << '\n';
    out.flush();
    if (!out) {
      std::lock_guard lock(mutex);
      failure = std::make_exception_ptr(Error(ErrorKind::io_error, "cannot append to " + archive_path.string()));
      stop.store(true);
      break;
    }
    if (options.on_record) options.on_record(rec);
    fresh.records.push_back(std::move(rec));
  }
  for (auto& t : pool) t.join();
  out.close();
  if (failure) std::rethrow_exception(failure);
  if (reorder) reorder_lines(archive_path);

  RunSummary summary;
  summary.total = trials.size();
  summary.executed = fresh.records.size();
  summary.resumed = existing.records.size();
  summary.counts = status_counts(existing);
  for (const auto& [status, n] : status_counts(fresh)) summary.counts[status] += n;
  return summary;
}

}  // namespace veritas
