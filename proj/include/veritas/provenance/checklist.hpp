#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "veritas/core/model.hpp"
#include "veritas/core/value.hpp"
#include "veritas/provenance/archive.hpp"
#include "veritas/provenance/fair.hpp"

namespace veritas {

enum class ItemStatus { pass, fail, manual_attestation };

std::string_view to_string(ItemStatus s);

inline constexpr std::array<std::string_view, 16> kChecklistItems = {
    "Falsifiable hypotheses defined",
    "Independent variables defined",
    "Control variables defined",
    "Dependent variables defined",
    "Baseline models defined",
    "Multiple data sets selected",
    "Replication runs (re-runs) performed",
    "All random seeds set and multiple values tested",
    "Cross validations over partial data sets performed",
    "Hyperparameter tuning for every model including baselines performed",
    "Results averaged with mean and variance values over cross validations, seeds and replications",
    "Statistical testing of hypotheses performed",
    "Code published",
    "Software environment published",
    "Data published (FAIR)",
    "Trained model (weights) published",
};

struct ChecklistItem {
  std::size_t number = 0;  // 1-based
  std::string_view title;
  ItemStatus status = ItemStatus::fail;
  std::string evidence;  // "manifest:…", "archive:…", "report:…" or "fair:…"
  std::string note;
};

struct ChecklistReport {
  std::vector<ChecklistItem> items;  // one per checklist line, in order

  bool passed() const;  // no item failed
};

// Every input is optional; a missing input fails the items that need it.
struct AuditInputs {
  const ExperimentDesign* design = nullptr;
  const RunArchive* archive = nullptr;
  const Json* report = nullptr;  // structured report, verdicts included
  const FairDescriptor* fair = nullptr;
};

// Items 1-12 are checked against the inputs. Items 13-16 become
// manual-attestation when attested in the manifest (item 15 also needs a
// complete FAIR descriptor) and fail otherwise.
ChecklistReport audit_checklist(const AuditInputs& in);

Json checklist_to_json(const ChecklistReport& r);
std::string render_checklist(const ChecklistReport& r);

}  // namespace veritas
