#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "veritas/core/value.hpp"

namespace veritas {

enum class DomainKind { real, integer, categorical };
enum class Role { independent, control, dependent };

std::string_view to_string(DomainKind k);
std::string_view to_string(Role r);
DomainKind parse_domain_kind(std::string_view s);
Role parse_role(std::string_view s);

struct VariableDomain {
  DomainKind kind = DomainKind::real;
  std::optional<double> lower;  // real/integer only, inclusive
  std::optional<double> upper;
  std::vector<std::string> levels;  // categorical only, ordered

  bool contains(const Value& v) const;

  static VariableDomain real(std::optional<double> lo = {}, std::optional<double> hi = {});
  static VariableDomain integer(std::optional<double> lo = {}, std::optional<double> hi = {});
  static VariableDomain categorical(std::vector<std::string> levels);
};

struct VariableSpec {
  std::string name;
  Role role = Role::independent;
  VariableDomain domain;
  std::string description;
};

// Conjunction of equality clauses over X/C bindings, e.g. {method: "candidate"}.
using GroupSelector = std::map<std::string, Value>;

enum class Pairing { paired, unpaired };
enum class Direction { two_sided, greater, less };

std::string_view to_string(Pairing p);
std::string_view to_string(Direction d);
Pairing parse_pairing(std::string_view s);
Direction parse_direction(std::string_view s);

// H0: no difference in `metric` between groupA and groupB.
// Ha by direction: two_sided (A != B), greater (A > B), less (A < B).
struct Hypothesis {
  std::string id;
  std::string metric;
  GroupSelector group_a;
  GroupSelector group_b;
  Pairing pairing = Pairing::paired;
  Direction direction = Direction::two_sided;
  double alpha = 0.05;
  std::string statement_null;
  std::string statement_alt;
};

struct Attestations {
  bool code_published = false;
  bool environment_published = false;
  bool data_published = false;
  bool model_published = false;
};

// Seeded random subsample of the factor grid (random search).
struct GridSubsample {
  std::size_t count = 0;
};

struct ExperimentDesign {
  std::vector<VariableSpec> variables;
  // Levels per independent variable, in variable declaration order.
  std::map<std::string, std::vector<Value>> factor_grid;
  std::map<std::string, Value> control_bindings;
  std::uint32_t replications = 1;
  std::uint64_t master_seed = 0;
  std::uint32_t seed_count = 1;
  std::uint32_t cv_folds = 0;
  std::vector<Hypothesis> hypotheses;
  Attestations attestations;

  // Factor designations for the audit; both optional.
  std::string method_factor;
  std::string dataset_factor;
  // Item counts handed to the executor as shuffle/fold index lists, keyed by
  // dataset level ("*" applies to every level).
  std::map<std::string, std::size_t> data_items;
  std::optional<GridSubsample> grid_subsample;

  const VariableSpec* find(std::string_view name) const;
  std::vector<const VariableSpec*> with_role(Role r) const;
};

struct TrialCoords {
  std::uint64_t grid_point = 0;
  std::uint64_t seed = 0;
  std::uint64_t fold = 0;
  std::uint64_t replication = 0;

  constexpr std::array<std::uint64_t, 4> as_array() const { return {grid_point, seed, fold, replication}; }
  auto operator<=>(const TrialCoords&) const = default;
};

struct Trial {
  std::uint64_t index = 0;
  TrialCoords coords;
  std::map<std::string, Value> bindings_x;
  std::map<std::string, Value> bindings_c;
  std::uint64_t derived_seed = 0;

  bool operator==(const Trial&) const = default;
};

}  // namespace veritas
