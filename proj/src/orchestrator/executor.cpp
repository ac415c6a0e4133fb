#include "veritas/orchestrator/executor.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/utsname.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "veritas/core/design.hpp"
#include "veritas/core/manifest.hpp"
#include "veritas/core/seed.hpp"
#include "veritas/error.hpp"
#include "veritas/orchestrator/folds.hpp"
#include "veritas/version.hpp"

extern char** environ;

namespace veritas {

namespace fs = std::filesystem;

std::string_view to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::ok: return "ok";
    case TrialStatus::failed: return "failed";
    case TrialStatus::timeout: return "timeout";
    case TrialStatus::invalid_output: return "invalid-output";
  }
  return "unknown";
}

TrialStatus parse_trial_status(std::string_view s) {
  for (auto st : {TrialStatus::ok, TrialStatus::failed, TrialStatus::timeout, TrialStatus::invalid_output}) {
    if (to_string(st) == s) return st;
  }
  throw Error(ErrorKind::invalid_argument, "unknown trial status '" + std::string(s) + "'");
}

void ExecutorConfig::validate() const {
  if (command.empty() || command.front().empty()) {
    throw Error(ErrorKind::invalid_argument, "executor command is empty");
  }
  if (!(timeout > 0.0) || !std::isfinite(timeout)) {
    throw Error(ErrorKind::invalid_argument, "executor timeout must be a positive number of seconds");
  }
  if (parallelism < 1) throw Error(ErrorKind::invalid_argument, "parallelism must be at least 1");
}

std::string ExecutorConfig::command_string() const {
  std::string out;
  for (const auto& arg : command) {
    if (!out.empty()) out += ' ';
    out += arg;
  }
  return out;
}

namespace {

[[noreturn]] void bad_executor(const std::string& field, const std::string& message) {
  throw Error(ErrorKind::invalid_manifest, "executor." + field + ": " + message);
}

}  // namespace

ExecutorConfig executor_from_json(const Json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorKind::invalid_manifest, "executor: expected an object");
  ExecutorConfig cfg;
  cfg.working_dir = base_dir.empty() ? fs::path(".") : base_dir;
  for (const auto& [key, value] : j.items()) {
    if (key == "command") {
      if (!value.is_array() || value.empty()) bad_executor(key, "expected a non-empty array of strings");
      for (const auto& arg : value) {
        if (!arg.is_string()) bad_executor(key, "expected a non-empty array of strings");
        cfg.command.push_back(arg.get<std::string>());
      }
    } else if (key == "timeout") {
      if (!value.is_number() || !(value.get<double>() > 0.0)) bad_executor(key, "expected a positive number");
      cfg.timeout = value.get<double>();
    } else if (key == "working_dir") {
      if (!value.is_string()) bad_executor(key, "expected a string");
      const fs::path wd = value.get<std::string>();
      cfg.working_dir = wd.is_absolute() ? wd : cfg.working_dir / wd;
    } else if (key == "env") {
      if (!value.is_object()) bad_executor(key, "expected an object of strings");
      for (const auto& [name, v] : value.items()) {
        if (!v.is_string()) bad_executor(key + "." + name, "expected a string");
        cfg.env_overrides[name] = v.get<std::string>();
      }
    } else if (key == "parallelism") {
      if (!value.is_number_integer() || value.get<std::int64_t>() < 1) {
        bad_executor(key, "expected an integer >= 1");
      }
      cfg.parallelism = static_cast<unsigned>(value.get<std::int64_t>());
    } else {
      bad_executor(key, "unknown field");
    }
  }
  if (cfg.command.empty()) bad_executor("command", "required");
  cfg.working_dir = cfg.working_dir.lexically_normal();
  return cfg;
}

Json executor_to_json(const ExecutorConfig& cfg) {
  Json j;
  j["command"] = cfg.command;
  j["timeout"] = cfg.timeout;
  j["working_dir"] = cfg.working_dir.string();
  j["env"] = Json::object();
  for (const auto& [k, v] : cfg.env_overrides) j["env"][k] = v;
  j["parallelism"] = cfg.parallelism;
  return j;
}

namespace {

std::string proc_field(const char* file, std::string_view key) {
  std::ifstream in(file);
  std::string line;
  while (std::getline(in, line)) {
    if (line.compare(0, key.size(), key) != 0) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    auto value = line.substr(colon + 1);
    const auto first = value.find_first_not_of(" \t");
    return first == std::string::npos ? std::string("unknown") : value.substr(first);
  }
  return "unknown";
}

}  // namespace

Environment capture_environment(const ExecutorConfig& cfg) {
  Environment env;
  utsname u{};
  env.os = uname(&u) == 0 ? std::string(u.sysname) + " " + u.release : "unknown";
  env.cpu_model = proc_field("/proc/cpuinfo", "model name");
  const unsigned cores = std::thread::hardware_concurrency();
  env.logical_cores = cores == 0 ? "unknown" : std::to_string(cores);
  env.total_memory = proc_field("/proc/meminfo", "MemTotal");
  env.harness_version = std::string(kHarnessVersion);
  env.command = cfg.command_string();
  return env;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  const std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  const auto n = std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%.*s.%03dZ", static_cast<int>(n), buf, static_cast<int>(ms % 1000));
  return out;
}

Json trial_input_json(const ExperimentDesign& design, const Trial& trial, const TrialPaths& paths) {
  const std::size_t n_items = data_items_for(design, trial);
  const auto seed = data_seed(design.master_seed, trial.coords.seed);
  const auto perm = shuffle_indices(n_items, seed);

  Json j;
  j["schema"] = kTrialSchema;
  j["trial"] = trial_to_json(trial);
  if (design.cv_folds >= 1) {
    // Item perm[p] belongs to fold (p + offset) mod k; lists keep shuffled order.
    const auto offset = fold_offset(design.cv_folds, seed);
    Json train = Json::array();
    Json test = Json::array();
    for (std::size_t p = 0; p < perm.size(); ++p) {
      ((p + offset) % design.cv_folds == trial.coords.fold ? test : train).push_back(perm[p]);
    }
    j["fold"] = {{"k", design.cv_folds},
                 {"index", trial.coords.fold},
                 {"n_items", n_items},
                 {"train", std::move(train)},
                 {"test", std::move(test)}};
  } else {
    j["fold"] = nullptr;
  }
  j["shuffle"] = perm;
  j["artifact_dir"] = paths.artifacts().string();
  j["output_path"] = paths.output().string();
  return j;
}

OutputCheck check_outputs(const ExperimentDesign& design, const Json& doc) {
  OutputCheck check;
  auto fail = [&](std::string msg) {
    check.outcomes.clear();
    check.problem = std::move(msg);
    return check;
  };
  if (!doc.is_object()) return fail("output is not an object");
  if (!doc.contains("schema") || doc["schema"] != kTrialSchema) {
    return fail("output schema is not " + std::string(kTrialSchema));
  }
  if (!doc.contains("outputs") || !doc["outputs"].is_object()) return fail("output has no 'outputs' object");
  const auto& outputs = doc["outputs"];
  for (const auto& [name, value] : outputs.items()) {
    const auto* var = design.find(name);
    if (var == nullptr || var->role != Role::dependent) return fail("unexpected output '" + name + "'");
  }
  for (const auto* var : design.with_role(Role::dependent)) {
    if (!outputs.contains(var->name)) return fail("missing output '" + var->name + "'");
    const auto& raw = outputs[var->name];
    Value v;
    switch (var->domain.kind) {
      case DomainKind::real:
        if (!raw.is_number()) return fail("output '" + var->name + "' is not a number");
        v = raw.get<double>();
        break;
      case DomainKind::integer:
        if (!raw.is_number_integer()) return fail("output '" + var->name + "' is not an integer");
        v = raw.get<std::int64_t>();
        break;
      case DomainKind::categorical:
        if (!raw.is_string()) return fail("output '" + var->name + "' is not a string");
        v = raw.get<std::string>();
        break;
    }
    if (!var->domain.contains(v)) return fail("output '" + var->name + "' = " + to_string(v) + " outside its domain");
    check.outcomes.emplace(var->name, std::move(v));
  }
  return check;
}

namespace {

std::string substitute(std::string arg, const std::map<std::string, std::string>& vars) {
  for (const auto& [key, value] : vars) {
    for (auto pos = arg.find(key); pos != std::string::npos; pos = arg.find(key, pos + value.size())) {
      arg.replace(pos, key.size(), value);
    }
  }
  return arg;
}

struct ProcessOutcome {
  enum class Kind { exited, signaled, timed_out, spawn_failed } kind = Kind::exited;
  int code = 0;  // exit status, signal number or errno
};

ProcessOutcome run_process(const std::vector<std::string>& args, const std::map<std::string, std::string>& env_overrides,
                           const fs::path& working_dir, const TrialPaths& paths, double timeout) {
  std::vector<std::string> env_strings;
  for (char** e = environ; *e != nullptr; ++e) {
    const std::string_view entry(*e);
    const auto name = entry.substr(0, entry.find('='));
    if (!env_overrides.contains(std::string(name))) env_strings.emplace_back(entry);
  }
  for (const auto& [k, v] : env_overrides) env_strings.push_back(k + "=" + v);

  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  std::vector<char*> envp;
  for (const auto& e : env_strings) envp.push_back(const_cast<char*>(e.c_str()));
  envp.push_back(nullptr);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  const std::string wd = fs::absolute(working_dir).string();
  const std::string out_log = fs::absolute(paths.stdout_log()).string();
  const std::string err_log = fs::absolute(paths.stderr_log()).string();
  posix_spawn_file_actions_addchdir_np(&actions, wd.c_str());
  posix_spawn_file_actions_addopen(&actions, 0, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, 1, out_log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_addopen(&actions, 2, err_log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);

  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, argv[0], &actions, &attr, argv.data(), envp.data());
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  if (rc != 0) return {ProcessOutcome::Kind::spawn_failed, rc};

  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout);
  auto pause = std::chrono::microseconds(100);
  int status = 0;
  for (;;) {
    const pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) return {ProcessOutcome::Kind::spawn_failed, errno};
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
      }
      return {ProcessOutcome::Kind::timed_out, 0};
    }
    std::this_thread::sleep_for(pause);
    pause = std::min(pause * 2, std::chrono::microseconds(10000));
  }
  if (WIFSIGNALED(status)) return {ProcessOutcome::Kind::signaled, WTERMSIG(status)};
  return {ProcessOutcome::Kind::exited, WEXITSTATUS(status)};
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out.flush()) throw Error(ErrorKind::io_error, "cannot write " + path.string());
}

}  // namespace

RunRecord execute_trial(const ExperimentDesign& design, const Trial& trial, const ExecutorConfig& cfg,
                        const TrialPaths& paths, const Environment& environment) {
  RunRecord rec;
  rec.trial = trial;
  rec.environment = environment;

  std::error_code ec;
  fs::create_directories(paths.artifacts(), ec);
  if (ec) throw Error(ErrorKind::io_error, "cannot create " + paths.artifacts().string() + ": " + ec.message());
  fs::remove(paths.output(), ec);
  write_file(paths.input(), trial_input_json(design, trial, paths).dump(2) + "\n");

  const std::map<std::string, std::string> vars{
      {"{input}", fs::absolute(paths.input()).string()},
      {"{output}", fs::absolute(paths.output()).string()},
      {"{artifacts}", fs::absolute(paths.artifacts()).string()},
      {"{seed}", std::to_string(trial.derived_seed)},
      {"{trial}", std::to_string(trial.index)},
  };
  std::vector<std::string> args;
  for (const auto& arg : cfg.command) args.push_back(substitute(arg, vars));

  rec.started_at = utc_timestamp();
  const auto t0 = std::chrono::steady_clock::now();
  const auto outcome = run_process(args, cfg.env_overrides, cfg.working_dir, paths, cfg.timeout);
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.finished_at = utc_timestamp();

  using Kind = ProcessOutcome::Kind;
  switch (outcome.kind) {
    case Kind::spawn_failed:
      rec.status = TrialStatus::failed;
      rec.detail = "cannot start executor: " + std::string(std::strerror(outcome.code));
      return rec;
    case Kind::timed_out:
      rec.status = TrialStatus::timeout;
      rec.detail = "exceeded timeout of " + to_string(Value(cfg.timeout)) + " s";
      return rec;
    case Kind::signaled:
      rec.status = TrialStatus::failed;
      rec.detail = "terminated by signal " + std::to_string(outcome.code);
      return rec;
    case Kind::exited:
      break;
  }
  rec.exit_code = outcome.code;
  if (outcome.code != 0) {
    rec.status = TrialStatus::failed;
    rec.detail = "exit status " + std::to_string(outcome.code);
    return rec;
  }

  std::ifstream in(paths.output(), std::ios::binary);
  if (!in) {
    rec.status = TrialStatus::invalid_output;
    rec.detail = "no output file";
    return rec;
  }
  Json doc = Json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    rec.status = TrialStatus::invalid_output;
    rec.detail = "output is not valid JSON";
    return rec;
  }
  auto check = check_outputs(design, doc);
  if (!check.problem.empty()) {
    rec.status = TrialStatus::invalid_output;
    rec.detail = std::move(check.problem);
    return rec;
  }
  rec.status = TrialStatus::ok;
  rec.outcomes = std::move(check.outcomes);
  return rec;
}

}  // namespace veritas
