#include "veritas/provenance/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "veritas/core/design.hpp"
#include "veritas/core/manifest.hpp"
#include "veritas/error.hpp"
#include "veritas/orchestrator/executor.hpp"
#include "veritas/stats/descriptive.hpp"
#include "veritas/version.hpp"

namespace veritas {

using selector::Verdict;
using stats::TestResult;

namespace {

Json optional_number(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

Json ci_to_json(const std::optional<stats::ConfidenceInterval>& ci) {
  if (!ci) return nullptr;
  return {{"level", ci->level}, {"lower", ci->lower}, {"center", ci->center}, {"upper", ci->upper}};
}

Json effect_to_json(const std::optional<stats::EffectSize>& e) {
  if (!e) return nullptr;
  return {{"kind", stats::to_string(e->kind)}, {"value", e->value}};
}

Json group_to_json(const GroupSelector& sel, const selector::GroupStats& g) {
  Json s = Json::object();
  for (const auto& [k, v] : sel) s[k] = to_json(v);
  return {{"selector", s}, {"n", g.n}, {"mean", g.mean}, {"sd", optional_number(g.sd)}, {"ci", ci_to_json(g.ci)}};
}

Json methods_to_json(const std::vector<stats::TestMethod>& ms) {
  Json a = Json::array();
  for (auto m : ms) a.push_back(stats::to_string(m));
  return a;
}

}  // namespace

Json test_result_to_json(const TestResult& r) {
  Json j;
  j["method"] = stats::to_string(r.method);
  j["statistic"] = r.statistic;
  j["p_value"] = r.p_value;
  j["mode"] = stats::to_string(r.mode);
  j["direction"] = to_string(r.direction);
  j["n"] = r.n;
  j["df"] = optional_number(r.df);
  j["effect"] = effect_to_json(r.effect);
  j["warnings"] = r.warnings;
  return j;
}

Json verdict_to_json(const Verdict& v, const Hypothesis& h) {
  Json j;
  j["hypothesis"] = v.hypothesis_id;
  j["metric"] = v.metric;
  j["statement_null"] = h.statement_null;
  j["statement_alt"] = h.statement_alt;
  j["pairing"] = to_string(v.pairing);
  j["direction"] = to_string(v.direction);
  j["alpha"] = v.alpha;
  j["decision"] = selector::to_string(v.decision);
  j["p_value"] = v.primary.p_value;
  j["p_adjusted"] = optional_number(v.p_adjusted);
  j["effect"] = effect_to_json(v.effect);
  j["primary"] = test_result_to_json(v.primary);
  j["secondary"] = v.secondary ? test_result_to_json(*v.secondary) : Json(nullptr);
  j["groups"] = {{"A", group_to_json(h.group_a, v.group_a)}, {"B", group_to_json(h.group_b, v.group_b)}};
  const auto& t = v.trace;
  j["trace"] = {{"alpha_pre", t.alpha_pre},
                {"normality_p", {{"A", optional_number(t.normality_p_a)}, {"B", optional_number(t.normality_p_b)}}},
                {"variance_p", optional_number(t.variance_p)},
                {"classification",
                 {{"distribution", selector::to_string(t.classification.distribution)},
                  {"variances", selector::to_string(t.classification.variances)}}},
                {"chosen", methods_to_json(t.chosen)},
                {"applied", methods_to_json(t.applied)},
                {"rationale", t.rationale}};
  return j;
}

Json generate_report(const ExperimentDesign& design, const RunArchive& archive, const selector::Analysis& analysis,
                     const ReportOptions& options) {
  Json report;
  report["schema"] = kReportSchema;
  report["generated_at"] = options.generated_at.empty() ? utc_timestamp() : options.generated_at;
  report["harness_version"] = kHarnessVersion;
  report["ci_level"] = options.ci_level;
  report["alpha_pre"] = options.alpha_pre;

  Json status = Json::object();
  for (const auto& [s, n] : status_counts(archive)) status[std::string(to_string(s))] = n;
  double wall = 0.0;
  Json environments = Json::array();
  std::vector<Environment> seen;
  for (const auto& rec : archive.records) {
    wall += rec.wall_time;
    if (std::find(seen.begin(), seen.end(), rec.environment) == seen.end()) {
      seen.push_back(rec.environment);
      environments.push_back({{"os", rec.environment.os},
                              {"cpu_model", rec.environment.cpu_model},
                              {"logical_cores", rec.environment.logical_cores},
                              {"total_memory", rec.environment.total_memory},
                              {"harness_version", rec.environment.harness_version},
                              {"command", rec.environment.command}});
    }
  }
  report["design"] = {{"trials", trial_count(design)},
                      {"records", archive.records.size()},
                      {"status", status},
                      {"total_wall_time", wall},
                      {"environments", environments}};

  // Cells: (grid point, numeric metric) over ok records, in grid then
  // declaration order.
  std::vector<const VariableSpec*> metrics;
  for (const auto* var : design.with_role(Role::dependent)) {
    if (var->domain.kind != DomainKind::categorical) metrics.push_back(var);
  }
  struct Cell {
    std::map<std::string, Value> x;
    std::map<std::string, std::vector<double>> values;
  };
  std::map<std::uint64_t, Cell> cells;
  std::vector<const RunRecord*> sorted;
  for (const auto& rec : archive.records) sorted.push_back(&rec);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const RunRecord* a, const RunRecord* b) { return a->trial.index < b->trial.index; });
  for (const auto* rec : sorted) {
    if (rec->status != TrialStatus::ok) continue;
    auto& cell = cells[rec->trial.coords.grid_point];
    cell.x = rec->trial.bindings_x;
    for (const auto* m : metrics) {
      if (auto it = rec->outcomes.find(m->name); it != rec->outcomes.end()) {
        if (auto v = as_real(it->second)) cell.values[m->name].push_back(*v);
      }
    }
  }
  Json cell_list = Json::array();
  for (const auto& [g, cell] : cells) {
    Json x = Json::object();
    for (const auto& [k, v] : cell.x) x[k] = to_json(v);
    for (const auto* m : metrics) {
      const auto it = cell.values.find(m->name);
      if (it == cell.values.end()) continue;
      const stats::Sample s(it->second);
      const auto d = stats::describe(s);
      std::optional<stats::ConfidenceInterval> ci;
      if (s.size() >= 2) ci = stats::confidence_interval(s, options.ci_level);
      cell_list.push_back({{"grid_point", g},
                           {"x", x},
                           {"metric", m->name},
                           {"n", d.n},
                           {"mean", d.mean},
                           {"sd", optional_number(d.sd)},
                           {"variance", optional_number(d.variance)},
                           {"ci", ci_to_json(ci)}});
    }
  }
  report["cells"] = std::move(cell_list);

  Json verdicts = Json::array();
  for (const auto& v : analysis.verdicts) {
    const auto it = std::find_if(design.hypotheses.begin(), design.hypotheses.end(),
                                 [&](const Hypothesis& h) { return h.id == v.hypothesis_id; });
    if (it == design.hypotheses.end()) {
      throw Error(ErrorKind::internal_inconsistency, "verdict for unknown hypothesis '" + v.hypothesis_id + "'");
    }
    verdicts.push_back(verdict_to_json(v, *it));
  }
  report["verdicts"] = std::move(verdicts);
  Json errors = Json::array();
  for (const auto& e : analysis.errors) {
    errors.push_back({{"hypothesis", e.hypothesis_id}, {"kind", to_string(e.kind)}, {"message", e.message}});
  }
  report["errors"] = std::move(errors);
  return report;
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

namespace {

std::string num(const Json& j) {
  if (j.is_null()) return "n/a";
  if (j.is_number_float()) return format_number(j.get<double>());
  return j.dump();
}

std::string scalar(const Json& j) { return j.is_string() ? j.get<std::string>() : num(j); }

std::string ci_text(const Json& ci) {
  if (ci.is_null()) return "n/a";
  return "[" + num(ci["lower"]) + ", " + num(ci["upper"]) + "]";
}

std::string bindings(const Json& obj) {
  std::string out;
  for (const auto& [k, v] : obj.items()) {
    if (!out.empty()) out += ' ';
    out += k + "=" + scalar(v);
  }
  return out;
}

void render_test(std::ostringstream& os, const char* label, const Json& t) {
  os << "    " << label << ": " << t["method"].get<std::string>() << "  statistic=" << num(t["statistic"])
     << "  p=" << num(t["p_value"]) << "  mode=" << t["mode"].get<std::string>()
     << "  direction=" << t["direction"].get<std::string>();
  if (!t["df"].is_null()) os << "  df=" << num(t["df"]);
  os << '\n';
  for (const auto& w : t["warnings"]) os << "      warning: " << w.get<std::string>() << '\n';
}

}  // namespace

std::string render_text(const Json& report) {
  std::ostringstream os;
  os << "veritas report (" << report.at("schema").get<std::string>() << ")\n";
  os << "generated: " << report.at("generated_at").get<std::string>() << '\n';
  os << "harness: " << report.at("harness_version").get<std::string>() << '\n';
  os << "CI level: " << num(report.at("ci_level")) << "  alpha_pre: " << num(report.at("alpha_pre")) << "\n\n";

  const auto& d = report.at("design");
  os << "trials: " << num(d.at("trials")) << "  records: " << num(d.at("records")) << '\n';
  os << "status:";
  for (const auto& [k, v] : d.at("status").items()) os << "  " << k << "=" << num(v);
  os << '\n';
  os << "total wall time: " << num(d.at("total_wall_time")) << " s\n";
  for (const auto& e : d.at("environments")) {
    os << "environment: " << e["os"].get<std::string>() << " | " << e["cpu_model"].get<std::string>() << " | "
       << e["logical_cores"].get<std::string>() << " cores | " << e["total_memory"].get<std::string>()
       << " | harness " << e["harness_version"].get<std::string>() << " | " << e["command"].get<std::string>()
       << '\n';
  }

  os << "\ncells (mean, sd, CI over ok trials)\n";
  for (const auto& c : report.at("cells")) {
    os << "  [" << num(c["grid_point"]) << "] " << bindings(c["x"]) << "  " << c["metric"].get<std::string>()
       << "  n=" << num(c["n"]) << "  mean=" << num(c["mean"]) << "  sd=" << num(c["sd"])
       << "  ci=" << ci_text(c["ci"]) << '\n';
  }

  os << "\nhypotheses\n";
  for (const auto& v : report.at("verdicts")) {
    os << "  " << v["hypothesis"].get<std::string>() << ": " << v["decision"].get<std::string>() << "  ("
       << v["metric"].get<std::string>() << ", " << v["pairing"].get<std::string>() << ", "
       << v["direction"].get<std::string>() << ", alpha=" << num(v["alpha"]) << ")\n";
    os << "    H0: " << v["statement_null"].get<std::string>() << '\n';
    os << "    Ha: " << v["statement_alt"].get<std::string>() << '\n';
    os << "    p=" << num(v["p_value"]);
    if (!v["p_adjusted"].is_null()) os << "  p_holm=" << num(v["p_adjusted"]);
    if (!v["effect"].is_null()) {
      os << "  effect " << v["effect"]["kind"].get<std::string>() << "=" << num(v["effect"]["value"]);
    }
    os << '\n';
    render_test(os, "primary", v["primary"]);
    if (!v["secondary"].is_null()) render_test(os, "secondary", v["secondary"]);
    for (const char* g : {"A", "B"}) {
      const auto& grp = v["groups"][g];
      os << "    group " << g << " (" << bindings(grp["selector"]) << "): n=" << num(grp["n"])
         << "  mean=" << num(grp["mean"]) << "  sd=" << num(grp["sd"]) << "  ci=" << ci_text(grp["ci"]) << '\n';
    }
    const auto& t = v["trace"];
    os << "    classification: " << t["classification"]["distribution"].get<std::string>() << "/"
       << t["classification"]["variances"].get<std::string>() << "  normality p: A=" << num(t["normality_p"]["A"])
       << " B=" << num(t["normality_p"]["B"]) << "  variance p=" << num(t["variance_p"]) << '\n';
    for (const auto& r : t["rationale"]) os << "      - " << r.get<std::string>() << '\n';
  }
  for (const auto& e : report.at("errors")) {
    os << "  " << e["hypothesis"].get<std::string>() << ": not evaluated (" << e["kind"].get<std::string>()
       << ": " << e["message"].get<std::string>() << ")\n";
  }
  return os.str();
}

Json canonical_report(Json report) {
  report["generated_at"] = "";
  if (report.contains("design")) report["design"]["total_wall_time"] = 0.0;
  return report;
}

}  // namespace veritas
