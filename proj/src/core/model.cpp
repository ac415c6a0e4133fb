#include "veritas/core/model.hpp"

#include <algorithm>
#include <cmath>

#include "veritas/error.hpp"

namespace veritas {

std::string_view to_string(DomainKind k) {
  switch (k) {
    case DomainKind::real: return "real";
    case DomainKind::integer: return "integer";
    case DomainKind::categorical: return "categorical";
  }
  return "?";
}

std::string_view to_string(Role r) {
  switch (r) {
    case Role::independent: return "independent";
    case Role::control: return "control";
    case Role::dependent: return "dependent";
  }
  return "?";
}

std::string_view to_string(Pairing p) { return p == Pairing::paired ? "paired" : "unpaired"; }

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::two_sided: return "two-sided";
    case Direction::greater: return "greater";
    case Direction::less: return "less";
  }
  return "?";
}

DomainKind parse_domain_kind(std::string_view s) {
  if (s == "real") return DomainKind::real;
  if (s == "integer") return DomainKind::integer;
  if (s == "categorical") return DomainKind::categorical;
  throw Error(ErrorKind::invalid_argument, "unknown domain kind '" + std::string(s) + "'");
}

Role parse_role(std::string_view s) {
  if (s == "independent") return Role::independent;
  if (s == "control") return Role::control;
  if (s == "dependent") return Role::dependent;
  throw Error(ErrorKind::invalid_argument, "unknown role '" + std::string(s) + "'");
}

Pairing parse_pairing(std::string_view s) {
  if (s == "paired") return Pairing::paired;
  if (s == "unpaired") return Pairing::unpaired;
  throw Error(ErrorKind::invalid_argument, "unknown pairing '" + std::string(s) + "'");
}

Direction parse_direction(std::string_view s) {
  if (s == "two-sided") return Direction::two_sided;
  if (s == "greater") return Direction::greater;
  if (s == "less") return Direction::less;
  throw Error(ErrorKind::invalid_argument, "unknown direction '" + std::string(s) + "'");
}

namespace {

bool within(double x, const std::optional<double>& lo, const std::optional<double>& hi) {
  if (lo && x < *lo) return false;
  if (hi && x > *hi) return false;
  return true;
}

}  // namespace

bool VariableDomain::contains(const Value& v) const {
  switch (kind) {
    case DomainKind::real: {
      const auto* d = std::get_if<double>(&v);
      return d && std::isfinite(*d) && within(*d, lower, upper);
    }
    case DomainKind::integer: {
      const auto* i = std::get_if<std::int64_t>(&v);
      return i && within(static_cast<double>(*i), lower, upper);
    }
    case DomainKind::categorical: {
      const auto* s = std::get_if<std::string>(&v);
      return s && std::find(levels.begin(), levels.end(), *s) != levels.end();
    }
  }
  return false;
}

VariableDomain VariableDomain::real(std::optional<double> lo, std::optional<double> hi) {
  return VariableDomain{DomainKind::real, lo, hi, {}};
}

VariableDomain VariableDomain::integer(std::optional<double> lo, std::optional<double> hi) {
  return VariableDomain{DomainKind::integer, lo, hi, {}};
}

VariableDomain VariableDomain::categorical(std::vector<std::string> levels) {
  return VariableDomain{DomainKind::categorical, std::nullopt, std::nullopt, std::move(levels)};
}

const VariableSpec* ExperimentDesign::find(std::string_view name) const {
  for (const auto& v : variables) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

std::vector<const VariableSpec*> ExperimentDesign::with_role(Role r) const {
  std::vector<const VariableSpec*> out;
  for (const auto& v : variables) {
    if (v.role == r) out.push_back(&v);
  }
  return out;
}

}  // namespace veritas
