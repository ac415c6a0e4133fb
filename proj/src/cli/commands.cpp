#include "veritas/cli/commands.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "veritas/core/design.hpp"
#include "veritas/core/manifest.hpp"
#include "veritas/error.hpp"
#include "veritas/orchestrator/run.hpp"
#include "veritas/provenance/checklist.hpp"
#include "veritas/provenance/fair.hpp"
#include "veritas/provenance/report.hpp"
#include "veritas/selector/selector.hpp"

namespace veritas::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestTemplate = R"(// Experiment manifest (schema veritas_manifest_v1). Comments are allowed.
//
// Independent variables span the factor grid; each trial binds one level of
// every independent variable, plus the fixed control bindings. The executor
// reports one value per dependent variable.
{
  "schema": "veritas_manifest_v1",
  "variables": [
    {"name": "method", "role": "independent",
     "domain": {"kind": "categorical", "levels": ["baseline", "candidate"]},
     "description": "Model under test; baseline is the reference method"},
    {"name": "dataset", "role": "independent",
     "domain": {"kind": "categorical", "levels": ["iris", "wine"]},
     "description": "Benchmark data set"},
    {"name": "epochs", "role": "control",
     "domain": {"kind": "integer", "lower": 1},
     "description": "Training epochs, fixed for every trial"},
    {"name": "accuracy", "role": "dependent",
     "domain": {"kind": "real", "lower": 0, "upper": 1},
     "description": "Accuracy on the held-out fold"}
  ],
  "factor_grid": {"method": ["baseline", "candidate"], "dataset": ["iris", "wine"]},
  "control_bindings": {"epochs": 10},
  "method_factor": "method",
  "dataset_factor": "dataset",

  // All randomness derives from master_seed.
  "master_seed": 20240611,
  "seed_count": 3,
  "cv_folds": 5,
  "replications": 2,
  // Items per data set; the executor receives shuffled index lists per fold.
  "data_items": {"iris": 150, "wine": 178},

  "hypotheses": [
    {"id": "H1", "metric": "accuracy",
     "groupA": {"method": "candidate"}, "groupB": {"method": "baseline"},
     "pairing": "paired", "direction": "greater", "alpha": 0.05,
     "statement_null": "candidate and baseline reach the same accuracy",
     "statement_alt": "candidate reaches higher accuracy than baseline"}
  ],

  // Publication items of the checklist; set to true once done.
  "attestations": {"code_published": false, "environment_published": false,
                   "data_published": false, "model_published": false},

  // Placeholders: {input} {output} {artifacts} {seed} {trial}
  "executor": {"command": ["sh", "executor.sh", "{input}", "{output}", "{seed}"],
               "timeout": 60, "working_dir": ".", "parallelism": 1}
}
)";

constexpr const char* kExecutorTemplate = R"(#!/bin/sh
# Stub experiment. Invoked as
#   sh executor.sh <input.json> <output.json> <derived seed>
# It must write {"schema": "veritas_trial_v1", "outputs": {...}} to <output.json>.
# Replace the accuracy computation with a call to the real experiment; the
# input file carries the bindings, the fold's train/test index lists and the
# seed.
output="$2"
seed="$3"
digits=$(printf '%s' "$seed" | tail -c 6)
accuracy=$(awk -v d="$digits" 'BEGIN { printf "%.6f", 0.5 + 0.4 * d / 1000000 }')
printf '{"schema": "veritas_trial_v1", "outputs": {"accuracy": %s}}\n' "$accuracy" > "$output"
)";

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_manifest: return kInvalidManifest;
    case ErrorKind::insufficient_data:
    case ErrorKind::alignment_error: return kInsufficientData;
    case ErrorKind::io_error: return kIoError;
    default: return kInternal;
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out.flush()) throw Error(ErrorKind::io_error, "cannot write " + path.string());
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot read " + path.string());
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::io_error, path.string() + ": not valid JSON");
  return j;
}

// Loads and validates; prints violations and returns nullopt when invalid.
std::optional<Manifest> load_valid(const fs::path& path, std::ostream& err) {
  Manifest m;
  try {
    m = load_manifest(path);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::invalid_manifest && e.kind() != ErrorKind::io_error) throw;
    err << path.string() << ": " << e.what() << '\n';
    return std::nullopt;
  }
  const auto violations = validate_design(m.design);
  for (const auto& v : violations) err << path.string() << ": " << v.path << ": " << v.message << '\n';
  if (!violations.empty()) return std::nullopt;
  return m;
}

ExecutorConfig executor_of(const Manifest& m) {
  if (m.executor.is_null()) throw Error(ErrorKind::invalid_manifest, "executor: section missing");
  return executor_from_json(m.executor, m.path.parent_path());
}

struct Flags {
  std::string manifest;
  std::string archive;
  std::string out;
  std::string report;
  std::string fair;
  std::string mode = "auto";
  std::optional<unsigned> parallelism;
  std::optional<double> timeout;
  std::optional<double> alpha;
  double ci_level = 0.95;
  bool holm = false;
  std::string dir = ".";
};

int do_validate(const Flags& f, std::ostream& out, std::ostream& err) {
  const auto m = load_valid(f.manifest, err);
  if (!m) return kInvalidManifest;
  try {
    if (!m->executor.is_null()) executor_of(*m).validate();
  } catch (const Error& e) {
    err << f.manifest << ": " << e.what() << '\n';
    return kInvalidManifest;
  }
  out << "valid: " << trial_count(m->design) << " trials\n";
  return kOk;
}

int do_run(const Flags& f, std::ostream& out, std::ostream& err) {
  const auto m = load_valid(f.manifest, err);
  if (!m) return kInvalidManifest;
  ExecutorConfig cfg;
  try {
    cfg = executor_of(*m);
  } catch (const Error& e) {
    err << f.manifest << ": " << e.what() << '\n';
    return kInvalidManifest;
  }
  if (f.parallelism) {
    cfg.parallelism = *f.parallelism;
  } else if (const char* env = std::getenv("VERITAS_PARALLELISM"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) {
      err << "VERITAS_PARALLELISM must be a positive integer\n";
      return kUsage;
    }
    cfg.parallelism = static_cast<unsigned>(n);
  }
  if (f.timeout) cfg.timeout = *f.timeout;

  const auto summary = run_experiment(m->design, cfg, f.archive);
  Json status = Json::object();
  for (const auto& [s, n] : summary.counts) status[std::string(to_string(s))] = n;
  out << Json{{"total", summary.total}, {"executed", summary.executed}, {"resumed", summary.resumed},
              {"status", status}}
             .dump()
      << '\n';
  if (!summary.all_ok()) {
    err << "some trials did not complete ok; see " << f.archive << '\n';
    return kTrialFailures;
  }
  return kOk;
}

int do_analyze(const Flags& f, std::ostream& out, std::ostream& err) {
  const auto m = load_valid(f.manifest, err);
  if (!m) return kInvalidManifest;
  const auto archive = read_archive(f.archive);

  selector::AnalysisOptions opts;
  opts.alpha = f.alpha;
  opts.ci_level = f.ci_level;
  opts.mode = stats::parse_exact_mode(f.mode);
  opts.holm = f.holm;
  const auto analysis = selector::analyze(m->design, archive.records, opts);

  ReportOptions ropts;
  ropts.ci_level = f.ci_level;
  const Json report = generate_report(m->design, archive, analysis, ropts);
  const fs::path dir = f.out.empty() ? fs::path(".") : fs::path(f.out);
  fs::create_directories(dir);
  write_text(dir / "report.json", report.dump(2) + "\n");
  write_text(dir / "report.txt", render_text(report));

  for (const auto& v : report["verdicts"]) {
    out << Json{{"hypothesis", v["hypothesis"]},
                {"decision", v["decision"]},
                {"p_value", v["p_value"]},
                {"alpha", v["alpha"]},
                {"test", v["primary"]["method"]}}
               .dump()
        << '\n';
  }
  for (const auto& e : analysis.errors) {
    err << "hypothesis " << e.hypothesis_id << ": " << to_string(e.kind) << ": " << e.message << '\n';
  }
  return analysis.errors.empty() ? kOk : kInsufficientData;
}

int do_audit(const Flags& f, std::ostream& out, std::ostream& err) {
  const auto m = load_valid(f.manifest, err);
  if (!m) return kInvalidManifest;
  std::optional<RunArchive> archive;
  if (!f.archive.empty()) archive = read_archive(f.archive);
  std::optional<Json> report;
  fs::path report_path = f.report;
  if (report_path.empty() && !f.out.empty()) report_path = fs::path(f.out) / "report.json";
  if (!report_path.empty() && fs::exists(report_path)) report = read_json(report_path);
  std::optional<FairDescriptor> fair;
  if (!f.fair.empty()) fair = load_fair(f.fair);

  AuditInputs in;
  in.design = &m->design;
  in.archive = archive ? &*archive : nullptr;
  in.report = report ? &*report : nullptr;
  in.fair = fair ? &*fair : nullptr;
  const auto result = audit_checklist(in);
  out << render_checklist(result);
  if (!f.out.empty()) {
    fs::create_directories(f.out);
    write_text(fs::path(f.out) / "checklist.json", checklist_to_json(result).dump(2) + "\n");
  }
  return result.passed() ? kOk : kAuditFailures;
}

int do_report(const Flags& f, std::ostream& out, std::ostream& err) {
  fs::path path = f.report;
  if (path.empty()) path = fs::path(f.out.empty() ? "." : f.out) / "report.json";
  if (!fs::exists(path)) {
    err << "no structured report at " << path.string() << '\n';
    return kUsage;
  }
  const auto text = render_text(read_json(path));
  if (!f.out.empty()) write_text(fs::path(f.out) / "report.txt", text);
  out << text;
  return kOk;
}

}  // namespace

int cmd_init(const fs::path& dir, std::ostream& out, std::ostream& err) {
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec) || !fs::is_empty(dir, ec)) {
      err << dir.string() << " exists and is not an empty directory; nothing written\n";
      return kScaffoldConflict;
    }
  } else if (!fs::create_directories(dir, ec)) {
    err << "cannot create " << dir.string() << ": " << ec.message() << '\n';
    return kIoError;
  }
  write_text(dir / kScaffoldManifest, kManifestTemplate);
  write_text(dir / kScaffoldExecutor, kExecutorTemplate);
  fs::permissions(dir / kScaffoldExecutor, fs::perms::owner_exec | fs::perms::group_exec | fs::perms::others_exec,
                  fs::perm_options::add, ec);
  out << (dir / kScaffoldManifest).string() << '\n' << (dir / kScaffoldExecutor).string() << '\n';
  return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hypothesis-driven experiment harness", "veritas"};
  app.require_subcommand(1);
  Flags f;

  auto* init = app.add_subcommand("init", "Scaffold an example manifest and stub executor");
  init->add_option("dir", f.dir, "Target directory (must be empty or absent)");

  auto* validate = app.add_subcommand("validate", "Check a manifest");
  validate->add_option("--manifest", f.manifest, "Manifest path")->required();

  auto* run_cmd = app.add_subcommand("run", "Execute every trial missing from the archive");
  run_cmd->add_option("--manifest", f.manifest, "Manifest path")->required();
  run_cmd->add_option("--archive", f.archive, "Run archive (created or resumed)")->required();
  run_cmd->add_option("--parallelism", f.parallelism, "Concurrent trials (default: VERITAS_PARALLELISM, manifest)")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--timeout", f.timeout, "Per-trial timeout in seconds")->check(CLI::PositiveNumber);

  auto* analyze = app.add_subcommand("analyze", "Test hypotheses and write report.json and report.txt");
  analyze->add_option("--manifest", f.manifest, "Manifest path")->required();
  analyze->add_option("--archive", f.archive, "Run archive")->required();
  analyze->add_option("--alpha", f.alpha, "Significance level for every hypothesis")
      ->check(CLI::Range(0.0, 1.0));
  analyze->add_option("--ci-level", f.ci_level, "Confidence level of reported intervals")
      ->check(CLI::Range(0.0, 1.0));
  analyze->add_option("--mode", f.mode, "p-value route for rank and KS tests")
      ->check(CLI::IsMember({"auto", "exact", "approx"}));
  analyze->add_option("--out", f.out, "Output directory (default: current directory)");
  analyze->add_flag("--holm", f.holm, "Holm-Bonferroni adjustment across hypotheses");

  auto* audit = app.add_subcommand("audit", "Check the methodology checklist");
  audit->add_option("--manifest", f.manifest, "Manifest path")->required();
  audit->add_option("--archive", f.archive, "Run archive");
  audit->add_option("--report", f.report, "Structured report (default: <out>/report.json)");
  audit->add_option("--out", f.out, "Directory holding report.json; checklist.json is written there");
  audit->add_option("--fair", f.fair, "FAIR descriptor (veritas_fair_v1)");

  auto* report = app.add_subcommand("report", "Render report.json as text");
  report->add_option("--report", f.report, "Structured report (default: <out>/report.json)");
  report->add_option("--out", f.out, "Directory holding report.json; report.txt is rewritten there");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (init->parsed()) return cmd_init(f.dir, out, err);
    if (validate->parsed()) return do_validate(f, out, err);
    if (run_cmd->parsed()) return do_run(f, out, err);
    if (analyze->parsed()) {
      if (f.ci_level <= 0.0 || f.ci_level >= 1.0 || (f.alpha && (*f.alpha <= 0.0 || *f.alpha >= 1.0))) {
        err << "--alpha and --ci-level must lie strictly between 0 and 1\n";
        return kUsage;
      }
      return do_analyze(f, out, err);
    }
    if (audit->parsed()) return do_audit(f, out, err);
    if (report->parsed()) return do_report(f, out, err);
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.message() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}

}  // namespace veritas::cli
