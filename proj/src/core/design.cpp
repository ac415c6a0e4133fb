#include "veritas/core/design.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "veritas/core/seed.hpp"
#include "veritas/error.hpp"

namespace veritas {
namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

std::uint64_t full_grid_size(const ExperimentDesign& d) {
  std::uint64_t n = 1;
  for (const auto* v : d.with_role(Role::independent)) {
    const auto it = d.factor_grid.find(v->name);
    n = saturating_mul(n, it == d.factor_grid.end() ? 0 : it->second.size());
  }
  return n;
}

std::uint64_t grid_point_count(const ExperimentDesign& d) {
  const auto full = full_grid_size(d);
  if (d.grid_subsample && d.grid_subsample->count < full) return d.grid_subsample->count;
  return full;
}

std::map<std::string, Value> grid_point_at(const ExperimentDesign& d,
                                           const std::vector<const VariableSpec*>& xs,
                                           std::uint64_t ordinal) {
  std::map<std::string, Value> point;
  // Last variable varies fastest.
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) {
    const auto& levels = d.factor_grid.at((*it)->name);
    point[(*it)->name] = levels[ordinal % levels.size()];
    ordinal /= levels.size();
  }
  return point;
}

bool matches(const GroupSelector& sel, const std::map<std::string, Value>& x,
             const std::map<std::string, Value>& c) {
  for (const auto& [name, value] : sel) {
    if (auto it = x.find(name); it != x.end()) {
      if (it->second != value) return false;
    } else if (auto jt = c.find(name); jt != c.end()) {
      if (jt->second != value) return false;
    } else {
      return false;
    }
  }
  return true;
}

void check_domain(const VariableSpec& v, std::vector<Violation>& out) {
  const std::string base = "variables[" + v.name + "].domain";
  const auto& d = v.domain;
  if (d.kind == DomainKind::categorical) {
    if (d.levels.empty()) out.push_back({base + ".levels", "categorical domain has no levels"});
    std::set<std::string> seen;
    for (const auto& l : d.levels) {
      if (l.empty()) out.push_back({base + ".levels", "empty level label"});
      if (!seen.insert(l).second) out.push_back({base + ".levels", "duplicate level '" + l + "'"});
    }
    if (d.lower || d.upper) out.push_back({base, "categorical domain cannot carry bounds"});
  } else {
    if (d.lower && d.upper && *d.lower > *d.upper) {
      out.push_back({base, "lower bound exceeds upper bound"});
    }
    if (!d.levels.empty()) out.push_back({base + ".levels", "numeric domain cannot carry levels"});
  }
}

}  // namespace

std::vector<Violation> validate_design(const ExperimentDesign& design) {
  std::vector<Violation> out;

  std::set<std::string> names;
  for (std::size_t i = 0; i < design.variables.size(); ++i) {
    const auto& v = design.variables[i];
    if (v.name.empty()) {
      out.push_back({"variables[" + std::to_string(i) + "].name", "empty variable name"});
      continue;
    }
    if (!names.insert(v.name).second) {
      out.push_back({"variables[" + v.name + "].name", "duplicate variable name"});
    }
    check_domain(v, out);
  }

  for (const auto& v : design.variables) {
    const auto grid = design.factor_grid.find(v.name);
    const auto bound = design.control_bindings.find(v.name);
    switch (v.role) {
      case Role::independent: {
        if (grid == design.factor_grid.end() || grid->second.empty()) {
          out.push_back({"factor_grid." + v.name, "independent variable has no grid levels"});
          break;
        }
        std::set<std::string> seen;
        for (std::size_t k = 0; k < grid->second.size(); ++k) {
          const auto& level = grid->second[k];
          const auto path = "factor_grid." + v.name + "[" + std::to_string(k) + "]";
          if (!v.domain.contains(level)) {
            out.push_back({path, "level " + to_string(level) + " outside domain of '" + v.name + "'"});
          }
          if (!seen.insert(to_string(level)).second) {
            out.push_back({path, "duplicate grid level " + to_string(level)});
          }
        }
        if (bound != design.control_bindings.end()) {
          out.push_back({"control_bindings." + v.name, "independent variable bound as control"});
        }
        break;
      }
      case Role::control:
        if (bound == design.control_bindings.end()) {
          out.push_back({"control_bindings." + v.name, "control variable has no binding"});
        } else if (!v.domain.contains(bound->second)) {
          out.push_back({"control_bindings." + v.name,
                         "binding " + to_string(bound->second) + " outside domain of '" + v.name + "'"});
        }
        if (grid != design.factor_grid.end()) {
          out.push_back({"factor_grid." + v.name, "control variable listed in factor grid"});
        }
        break;
      case Role::dependent:
        if (grid != design.factor_grid.end()) {
          out.push_back({"factor_grid." + v.name, "dependent variable cannot be set"});
        }
        if (bound != design.control_bindings.end()) {
          out.push_back({"control_bindings." + v.name, "dependent variable cannot be set"});
        }
        break;
    }
  }
  for (const auto& [name, levels] : design.factor_grid) {
    if (!design.find(name)) out.push_back({"factor_grid." + name, "unknown variable"});
  }
  for (const auto& [name, value] : design.control_bindings) {
    if (!design.find(name)) out.push_back({"control_bindings." + name, "unknown variable"});
  }

  if (design.replications < 1) out.push_back({"replications", "replications must be >= 1"});
  if (design.seed_count < 1) out.push_back({"seed_count", "seed_count must be >= 1"});
  for (const auto& [level, n] : design.data_items) {
    if (n < 1) out.push_back({"data_items." + level, "item count must be >= 1"});
    if (design.cv_folds > n) {
      out.push_back({"data_items." + level, "cv_folds exceeds item count"});
    }
  }

  auto check_factor = [&](const std::string& field, const std::string& name) {
    if (name.empty()) return;
    const auto* v = design.find(name);
    if (!v || v->role != Role::independent || v->domain.kind != DomainKind::categorical) {
      out.push_back({field, "'" + name + "' is not a categorical independent variable"});
    }
  };
  check_factor("method_factor", design.method_factor);
  check_factor("dataset_factor", design.dataset_factor);

  if (design.grid_subsample) {
    if (design.grid_subsample->count < 1) {
      out.push_back({"grid_subsample.count", "subsample count must be >= 1"});
    } else if (design.grid_subsample->count > full_grid_size(design)) {
      out.push_back({"grid_subsample.count", "subsample count exceeds grid size"});
    }
  }

  const bool grid_ok = out.empty();
  std::vector<std::map<std::string, Value>> points;
  if (grid_ok && trial_count(design) <= kDefaultTrialCap) points = grid_points(design);

  std::set<std::string> ids;
  for (std::size_t i = 0; i < design.hypotheses.size(); ++i) {
    const auto& h = design.hypotheses[i];
    const std::string base = "hypotheses[" + std::to_string(i) + "]";
    if (h.id.empty()) out.push_back({base + ".id", "empty hypothesis id"});
    if (!ids.insert(h.id).second) out.push_back({base + ".id", "duplicate hypothesis id '" + h.id + "'"});
    if (!(h.alpha > 0.0 && h.alpha < 1.0)) out.push_back({base + ".alpha", "alpha out of (0,1)"});

    const auto* metric = design.find(h.metric);
    if (!metric || metric->role != Role::dependent) {
      out.push_back({base + ".metric", "metric '" + h.metric + "' is not a dependent variable"});
    } else if (metric->domain.kind == DomainKind::categorical) {
      out.push_back({base + ".metric", "metric '" + h.metric + "' is categorical, not testable"});
    }

    for (const auto* group : {&h.group_a, &h.group_b}) {
      const std::string gpath = base + (group == &h.group_a ? ".groupA" : ".groupB");
      if (group->empty()) out.push_back({gpath, "empty group selector"});
      for (const auto& [name, value] : *group) {
        const auto* v = design.find(name);
        if (!v || v->role == Role::dependent) {
          out.push_back({gpath + "." + name, "selector must name an independent or control variable"});
        } else if (!v->domain.contains(value)) {
          out.push_back({gpath + "." + name, "selector value " + to_string(value) + " outside domain"});
        }
      }
    }
    if (h.pairing == Pairing::paired) {
      std::set<std::string> ka, kb;
      for (const auto& [k, _] : h.group_a) ka.insert(k);
      for (const auto& [k, _] : h.group_b) kb.insert(k);
      if (ka != kb) out.push_back({base + ".pairing", "paired groups must select on the same variables"});
    }

    if (!points.empty()) {
      std::size_t in_a = 0, in_b = 0, both = 0;
      for (const auto& p : points) {
        const bool a = matches(h.group_a, p, design.control_bindings);
        const bool b = matches(h.group_b, p, design.control_bindings);
        in_a += a;
        in_b += b;
        both += a && b;
      }
      if (both > 0) out.push_back({base, "groupA and groupB overlap"});
      if (in_a == 0) out.push_back({base + ".groupA", "group selects no trials"});
      if (in_b == 0) out.push_back({base + ".groupB", "group selects no trials"});
    }
  }
  return out;
}

std::vector<std::map<std::string, Value>> grid_points(const ExperimentDesign& design) {
  const auto xs = design.with_role(Role::independent);
  const auto full = full_grid_size(design);
  std::vector<std::uint64_t> ordinals;
  if (design.grid_subsample && design.grid_subsample->count < full) {
    ordinals = fisher_yates(full, grid_seed(design.master_seed));
    ordinals.resize(design.grid_subsample->count);
    std::sort(ordinals.begin(), ordinals.end());
  } else {
    ordinals.resize(full);
    for (std::uint64_t i = 0; i < full; ++i) ordinals[i] = i;
  }
  std::vector<std::map<std::string, Value>> points;
  points.reserve(ordinals.size());
  for (const auto o : ordinals) points.push_back(grid_point_at(design, xs, o));
  return points;
}

std::uint64_t trial_count(const ExperimentDesign& design) {
  std::uint64_t n = grid_point_count(design);
  n = saturating_mul(n, design.seed_count);
  n = saturating_mul(n, std::max<std::uint64_t>(design.cv_folds, 1));
  return saturating_mul(n, design.replications);
}

TrialCoords coords_of(const ExperimentDesign& design, std::uint64_t index) {
  const std::uint64_t r = design.replications;
  const std::uint64_t k = std::max<std::uint64_t>(design.cv_folds, 1);
  const std::uint64_t s = design.seed_count;
  TrialCoords c;
  c.replication = index % r;
  index /= r;
  c.fold = index % k;
  index /= k;
  c.seed = index % s;
  c.grid_point = index / s;
  return c;
}

std::uint64_t index_of(const ExperimentDesign& design, const TrialCoords& c) {
  const std::uint64_t k = std::max<std::uint64_t>(design.cv_folds, 1);
  return ((c.grid_point * design.seed_count + c.seed) * k + c.fold) * design.replications +
         c.replication;
}

std::vector<Trial> enumerate_trials(const ExperimentDesign& design, std::uint64_t cap) {
  const auto total = trial_count(design);
  if (total > cap) {
    throw Error(ErrorKind::trial_cap_exceeded,
                "design expands to " + std::to_string(total) + " trials (cap " + std::to_string(cap) + ")");
  }
  const auto points = grid_points(design);
  std::vector<Trial> trials;
  trials.reserve(total);
  for (std::uint64_t i = 0; i < total; ++i) {
    Trial t;
    t.index = i;
    t.coords = coords_of(design, i);
    t.bindings_x = points[t.coords.grid_point];
    t.bindings_c = design.control_bindings;
    t.derived_seed = derive_seed(design.master_seed, t.coords);
    trials.push_back(std::move(t));
  }
  return trials;
}

std::size_t data_items_for(const ExperimentDesign& design, const Trial& trial) {
  if (!design.dataset_factor.empty()) {
    if (auto it = trial.bindings_x.find(design.dataset_factor); it != trial.bindings_x.end()) {
      if (auto jt = design.data_items.find(to_string(it->second)); jt != design.data_items.end()) {
        return jt->second;
      }
    }
  }
  if (auto it = design.data_items.find("*"); it != design.data_items.end()) return it->second;
  return 0;
}

}  // namespace veritas
