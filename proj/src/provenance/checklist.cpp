#include "veritas/provenance/checklist.hpp"

#include <set>
#include <sstream>

#include "veritas/core/design.hpp"

namespace veritas {

std::string_view to_string(ItemStatus s) {
  switch (s) {
    case ItemStatus::pass: return "pass";
    case ItemStatus::fail: return "fail";
    case ItemStatus::manual_attestation: return "manual-attestation";
  }
  return "unknown";
}

bool ChecklistReport::passed() const {
  for (const auto& item : items) {
    if (item.status == ItemStatus::fail) return false;
  }
  return true;
}

namespace {

struct Check {
  bool ok = false;
  std::string evidence;
  std::string note;
};

Check missing(const char* what, std::string evidence) { return {false, std::move(evidence), std::string(what) + " not provided"}; }

Check hypotheses_defined(const ExperimentDesign& d) {
  if (d.hypotheses.empty()) return {false, "manifest:hypotheses", "no hypotheses"};
  for (std::size_t i = 0; i < d.hypotheses.size(); ++i) {
    const auto& h = d.hypotheses[i];
    const std::string at = "manifest:hypotheses[" + std::to_string(i) + "]";
    if (h.statement_null.empty()) return {false, at + ".statement_null", "H0 statement missing"};
    if (h.statement_alt.empty()) return {false, at + ".statement_alt", "Ha statement missing"};
    if (h.metric.empty()) return {false, at + ".metric", "metric missing"};
    if (h.group_a.empty() || h.group_b.empty()) return {false, at, "group selector missing"};
    if (!(h.alpha > 0.0 && h.alpha < 1.0)) return {false, at + ".alpha", "alpha outside (0, 1)"};
  }
  return {true, "manifest:hypotheses", std::to_string(d.hypotheses.size()) + " hypotheses with H0, Ha and alpha"};
}

Check variables_defined(const ExperimentDesign& d, Role role) {
  const auto vars = d.with_role(role);
  const std::string label(to_string(role));
  if (vars.empty()) return {false, "manifest:variables", "no " + label + " variables"};
  for (const auto* v : vars) {
    const std::string at = "manifest:variables[" + v->name + "]";
    if (v->description.empty()) return {false, at + ".description", "'" + v->name + "' has no description"};
    if (role == Role::independent) {
      const auto it = d.factor_grid.find(v->name);
      if (it == d.factor_grid.end() || it->second.empty()) {
        return {false, "manifest:factor_grid." + v->name, "'" + v->name + "' has no levels"};
      }
    }
    if (role == Role::control && !d.control_bindings.contains(v->name)) {
      return {false, "manifest:control_bindings." + v->name, "'" + v->name + "' is not bound"};
    }
  }
  return {true, "manifest:variables", std::to_string(vars.size()) + " " + label + " variables"};
}

Check factor_with_levels(const ExperimentDesign& d, const std::string& factor, const char* field, const char* what) {
  const std::string evidence = std::string("manifest:") + field;
  if (factor.empty()) return {false, evidence, std::string("no ") + what + " factor designated"};
  const auto* v = d.find(factor);
  if (v == nullptr || v->role != Role::independent || v->domain.kind != DomainKind::categorical) {
    return {false, evidence, "'" + factor + "' is not a categorical independent variable"};
  }
  const auto it = d.factor_grid.find(factor);
  const std::size_t levels = it == d.factor_grid.end() ? 0 : it->second.size();
  if (levels < 2) return {false, "manifest:factor_grid." + factor, "'" + factor + "' has fewer than 2 levels"};
  return {true, "manifest:factor_grid." + factor, std::to_string(levels) + " levels"};
}

// Design asks for >= 2 values and the archive shows >= 2 among ok records.
Check repeated(std::uint64_t configured, const char* field, const RunArchive* archive,
               std::uint64_t (*coord)(const TrialCoords&)) {
  const std::string evidence = std::string("manifest:") + field;
  if (configured < 2) return {false, evidence, std::string(field) + " = " + std::to_string(configured)};
  if (archive == nullptr) return missing("archive", "archive");
  std::set<std::uint64_t> seen;
  for (const auto& r : archive->records) {
    if (r.status == TrialStatus::ok) seen.insert(coord(r.trial.coords));
  }
  if (seen.size() < 2) {
    return {false, "archive", "ok records cover " + std::to_string(seen.size()) + " distinct values"};
  }
  return {true, evidence + ", archive", std::to_string(seen.size()) + " distinct values in ok records"};
}

Check hyperparameters_crossed(const ExperimentDesign& d) {
  std::vector<std::string> hyper;
  for (const auto* v : d.with_role(Role::independent)) {
    if (v->name != d.method_factor && v->name != d.dataset_factor) hyper.push_back(v->name);
  }
  if (hyper.empty()) return {false, "manifest:factor_grid", "no hyperparameter factor besides method and dataset"};
  const auto points = grid_points(d);
  // Per method level (one pseudo-level without a method factor), every
  // hyperparameter must take at least 2 values.
  std::map<std::string, std::map<std::string, std::set<std::string>>> seen;
  for (const auto& p : points) {
    std::string method = "*";
    if (!d.method_factor.empty()) {
      if (auto it = p.find(d.method_factor); it != p.end()) method = to_string(it->second);
    }
    for (const auto& h : hyper) {
      if (auto it = p.find(h); it != p.end()) seen[method][h].insert(to_string(it->second));
    }
  }
  if (seen.empty()) return {false, "manifest:factor_grid", "empty grid"};
  for (const auto& [method, per_factor] : seen) {
    for (const auto& h : hyper) {
      const auto it = per_factor.find(h);
      if (it == per_factor.end() || it->second.size() < 2) {
        return {false, "manifest:factor_grid." + h,
                "'" + h + "' is not tuned over 2+ values for method level '" + method + "'"};
      }
    }
  }
  std::string names;
  for (const auto& h : hyper) names += (names.empty() ? "" : ", ") + h;
  return {true, "manifest:factor_grid", "tuned per method level: " + names};
}

Check results_averaged(const ExperimentDesign* d, const Json* report) {
  if (report == nullptr) return missing("report", "report");
  if (!report->contains("cells") || !(*report)["cells"].is_array() || (*report)["cells"].empty()) {
    return {false, "report:cells", "no aggregated cells"};
  }
  std::set<std::string> metrics;
  for (const auto& c : (*report)["cells"]) {
    if (!c.contains("mean") || !c.contains("sd") || !c.contains("variance") || !c.contains("metric")) {
      return {false, "report:cells", "cell without mean and variance"};
    }
    metrics.insert(c["metric"].get<std::string>());
  }
  if (d != nullptr) {
    for (const auto* v : d->with_role(Role::dependent)) {
      if (v->domain.kind != DomainKind::categorical && !metrics.contains(v->name)) {
        return {false, "report:cells", "no cells for metric '" + v->name + "'"};
      }
    }
  }
  return {true, "report:cells", std::to_string((*report)["cells"].size()) + " cells with mean and variance"};
}

Check tested(const ExperimentDesign& d, const Json* report) {
  if (d.hypotheses.empty()) return {false, "manifest:hypotheses", "no hypotheses"};
  if (report == nullptr) return missing("report", "report");
  std::set<std::string> ids;
  if (report->contains("verdicts")) {
    for (const auto& v : (*report)["verdicts"]) ids.insert(v.value("hypothesis", ""));
  }
  for (const auto& h : d.hypotheses) {
    if (!ids.contains(h.id)) return {false, "report:verdicts", "no verdict for '" + h.id + "'"};
  }
  return {true, "report:verdicts", std::to_string(d.hypotheses.size()) + " verdicts"};
}

Check attested(const ExperimentDesign* d, bool Attestations::*flag, const char* field) {
  const std::string evidence = std::string("manifest:attestations.") + field;
  if (d == nullptr) return missing("manifest", evidence);
  if (!(d->attestations.*flag)) return {false, evidence, "not attested"};
  return {true, evidence, "attested; verify manually"};
}

}  // namespace

ChecklistReport audit_checklist(const AuditInputs& in) {
  std::array<Check, 16> checks;
  const auto* d = in.design;
  if (d == nullptr) {
    for (std::size_t i = 0; i < 12; ++i) checks[i] = missing("manifest", "manifest");
  } else {
    checks[0] = hypotheses_defined(*d);
    checks[1] = variables_defined(*d, Role::independent);
    checks[2] = variables_defined(*d, Role::control);
    checks[3] = variables_defined(*d, Role::dependent);
    checks[4] = factor_with_levels(*d, d->method_factor, "method_factor", "method");
    checks[5] = factor_with_levels(*d, d->dataset_factor, "dataset_factor", "dataset");
    checks[6] = repeated(d->replications, "replications", in.archive,
                         [](const TrialCoords& c) { return c.replication; });
    checks[7] = repeated(d->seed_count, "seed_count", in.archive, [](const TrialCoords& c) { return c.seed; });
    checks[8] = repeated(d->cv_folds, "cv_folds", in.archive, [](const TrialCoords& c) { return c.fold; });
    checks[9] = hyperparameters_crossed(*d);
    checks[10] = results_averaged(d, in.report);
    checks[11] = tested(*d, in.report);
  }
  checks[12] = attested(d, &Attestations::code_published, "code_published");
  checks[13] = attested(d, &Attestations::environment_published, "environment_published");
  checks[14] = attested(d, &Attestations::data_published, "data_published");
  if (checks[14].ok) {
    if (in.fair == nullptr) {
      checks[14] = missing("FAIR descriptor", "fair");
    } else if (const auto gaps = fair_gaps(*in.fair); !gaps.empty()) {
      checks[14] = {false, "fair", gaps.front()};
    } else {
      checks[14].evidence += ", fair";
    }
  }
  checks[15] = attested(d, &Attestations::model_published, "model_published");

  ChecklistReport report;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    ChecklistItem item;
    item.number = i + 1;
    item.title = kChecklistItems[i];
    const bool manual = i >= 12;
    item.status = !checks[i].ok ? ItemStatus::fail : manual ? ItemStatus::manual_attestation : ItemStatus::pass;
    item.evidence = std::move(checks[i].evidence);
    item.note = std::move(checks[i].note);
    report.items.push_back(std::move(item));
  }
  return report;
}

Json checklist_to_json(const ChecklistReport& r) {
  Json items = Json::array();
  for (const auto& item : r.items) {
    items.push_back({{"number", item.number},
                     {"item", item.title},
                     {"status", to_string(item.status)},
                     {"evidence", item.evidence},
                     {"note", item.note}});
  }
  return {{"items", items}, {"passed", r.passed()}};
}

std::string render_checklist(const ChecklistReport& r) {
  std::size_t width = 0;
  for (const auto& item : r.items) width = std::max(width, item.title.size());
  std::ostringstream os;
  for (const auto& item : r.items) {
    char num[8];
    std::snprintf(num, sizeof num, "%2zu", item.number);
    const auto status = to_string(item.status);
    os << num << "  " << item.title << std::string(width - item.title.size() + 2, ' ') << status
       << std::string(20 - status.size(), ' ') << item.evidence;
    if (!item.note.empty()) os << "  (" << item.note << ")";
    os << '\n';
  }
  return os.str();
}

}  // namespace veritas
