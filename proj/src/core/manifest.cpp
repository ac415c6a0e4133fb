#include "veritas/core/manifest.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "veritas/error.hpp"

namespace veritas {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::invalid_manifest, path + ": " + msg);
}

const Json& require(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) fail(path + "." + key, "missing field");
  return j.at(key);
}

template <typename T>
T get_as(const Json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(path, std::string("wrong type (") + e.what() + ")");
  }
}

std::uint64_t parse_u64(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    try {
      std::size_t used = 0;
      const auto v = std::stoull(s, &used, 0);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  fail(path, "expected unsigned 64-bit integer");
}

// Bring a literal into the variable's canonical alternative (1 -> 1.0 for reals,
// 2.0 -> 2 for integers). Anything else is left as-is for validate_design.
Value coerce(const ExperimentDesign& d, const std::string& name, Value v) {
  const auto* spec = d.find(name);
  if (!spec) return v;
  if (spec->domain.kind == DomainKind::real) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  } else if (spec->domain.kind == DomainKind::integer) {
    if (const auto* x = std::get_if<double>(&v); x && std::floor(*x) == *x && std::abs(*x) < 9.0e15) {
      return static_cast<std::int64_t>(*x);
    }
  }
  return v;
}

Value parse_value(const ExperimentDesign& d, const std::string& name, const Json& j,
                  const std::string& path) {
  try {
    return coerce(d, name, value_from_json(j));
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

GroupSelector parse_selector(const ExperimentDesign& d, const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "group selector must be an object of variable -> value");
  GroupSelector sel;
  for (const auto& [k, v] : j.items()) sel[k] = parse_value(d, k, v, path + "." + k);
  return sel;
}

template <typename E, typename F>
E parse_enum(const Json& j, const std::string& path, F parse) {
  const auto s = get_as<std::string>(j, path);
  try {
    return parse(s);
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

Json domain_to_json(const VariableDomain& d) {
  Json j;
  j["kind"] = to_string(d.kind);
  if (d.kind == DomainKind::categorical) {
    j["levels"] = d.levels;
  } else {
    if (d.lower) j["lower"] = *d.lower;
    if (d.upper) j["upper"] = *d.upper;
  }
  return j;
}

Json selector_to_json(const GroupSelector& s) {
  Json j = Json::object();
  for (const auto& [k, v] : s) j[k] = to_json(v);
  return j;
}

Json bindings_to_json(const std::map<std::string, Value>& b) {
  Json j = Json::object();
  for (const auto& [k, v] : b) j[k] = to_json(v);
  return j;
}

}  // namespace

ExperimentDesign design_from_json(const Json& j) {
  if (!j.is_object()) fail("$", "manifest must be an object");
  const auto schema = get_as<std::string>(require(j, "schema", "$"), "$.schema");
  if (schema != kManifestSchema) fail("$.schema", "expected '" + std::string(kManifestSchema) + "', got '" + schema + "'");

  ExperimentDesign d;
  const auto& vars = require(j, "variables", "$");
  if (!vars.is_array()) fail("$.variables", "must be an array");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto path = "$.variables[" + std::to_string(i) + "]";
    const auto& vj = vars[i];
    VariableSpec v;
    v.name = get_as<std::string>(require(vj, "name", path), path + ".name");
    v.role = parse_enum<Role>(require(vj, "role", path), path + ".role", parse_role);
    const auto& dj = require(vj, "domain", path);
    v.domain.kind = parse_enum<DomainKind>(require(dj, "kind", path + ".domain"), path + ".domain.kind",
                                           parse_domain_kind);
    if (dj.contains("lower")) v.domain.lower = get_as<double>(dj["lower"], path + ".domain.lower");
    if (dj.contains("upper")) v.domain.upper = get_as<double>(dj["upper"], path + ".domain.upper");
    if (dj.contains("levels")) {
      v.domain.levels = get_as<std::vector<std::string>>(dj["levels"], path + ".domain.levels");
    }
    if (vj.contains("description")) v.description = get_as<std::string>(vj["description"], path + ".description");
    d.variables.push_back(std::move(v));
  }

  if (j.contains("factor_grid")) {
    for (const auto& [name, levels] : j["factor_grid"].items()) {
      const auto path = "$.factor_grid." + name;
      if (!levels.is_array()) fail(path, "must be an array of levels");
      auto& out = d.factor_grid[name];
      for (std::size_t k = 0; k < levels.size(); ++k) {
        out.push_back(parse_value(d, name, levels[k], path + "[" + std::to_string(k) + "]"));
      }
    }
  }
  if (j.contains("control_bindings")) {
    for (const auto& [name, value] : j["control_bindings"].items()) {
      d.control_bindings[name] = parse_value(d, name, value, "$.control_bindings." + name);
    }
  }

  auto count = [&](const char* key, std::uint32_t dflt) -> std::uint32_t {
    if (!j.contains(key)) return dflt;
    const auto v = parse_u64(j[key], std::string("$.") + key);
    if (v > UINT32_MAX) fail(std::string("$.") + key, "too large");
    return static_cast<std::uint32_t>(v);
  };
  d.replications = count("replications", 1);
  d.seed_count = count("seed_count", 1);
  d.cv_folds = count("cv_folds", 0);
  d.master_seed = parse_u64(require(j, "master_seed", "$"), "$.master_seed");

  if (j.contains("method_factor")) d.method_factor = get_as<std::string>(j["method_factor"], "$.method_factor");
  if (j.contains("dataset_factor")) d.dataset_factor = get_as<std::string>(j["dataset_factor"], "$.dataset_factor");
  if (j.contains("data_items")) {
    for (const auto& [level, n] : j["data_items"].items()) {
      d.data_items[level] = parse_u64(n, "$.data_items." + level);
    }
  }
  if (j.contains("grid_subsample")) {
    d.grid_subsample = GridSubsample{parse_u64(require(j["grid_subsample"], "count", "$.grid_subsample"),
                                               "$.grid_subsample.count")};
  }

  if (j.contains("hypotheses")) {
    const auto& hs = j["hypotheses"];
    if (!hs.is_array()) fail("$.hypotheses", "must be an array");
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const auto path = "$.hypotheses[" + std::to_string(i) + "]";
      const auto& hj = hs[i];
      Hypothesis h;
      h.id = get_as<std::string>(require(hj, "id", path), path + ".id");
      h.metric = get_as<std::string>(require(hj, "metric", path), path + ".metric");
      h.group_a = parse_selector(d, require(hj, "groupA", path), path + ".groupA");
      h.group_b = parse_selector(d, require(hj, "groupB", path), path + ".groupB");
      if (hj.contains("pairing")) h.pairing = parse_enum<Pairing>(hj["pairing"], path + ".pairing", parse_pairing);
      if (hj.contains("direction")) {
        h.direction = parse_enum<Direction>(hj["direction"], path + ".direction", parse_direction);
      }
      if (hj.contains("alpha")) h.alpha = get_as<double>(hj["alpha"], path + ".alpha");
      if (hj.contains("statement_null")) h.statement_null = get_as<std::string>(hj["statement_null"], path + ".statement_null");
      if (hj.contains("statement_alt")) h.statement_alt = get_as<std::string>(hj["statement_alt"], path + ".statement_alt");
      d.hypotheses.push_back(std::move(h));
    }
  }

  if (j.contains("attestations")) {
    const auto& a = j["attestations"];
    auto flag = [&](const char* key) {
      return a.contains(key) && get_as<bool>(a[key], std::string("$.attestations.") + key);
    };
    d.attestations.code_published = flag("code_published");
    d.attestations.environment_published = flag("environment_published");
    d.attestations.data_published = flag("data_published");
    d.attestations.model_published = flag("model_published");
  }
  return d;
}

Json hypothesis_to_json(const Hypothesis& h) {
  Json j;
  j["id"] = h.id;
  j["metric"] = h.metric;
  j["groupA"] = selector_to_json(h.group_a);
  j["groupB"] = selector_to_json(h.group_b);
  j["pairing"] = to_string(h.pairing);
  j["direction"] = to_string(h.direction);
  j["alpha"] = h.alpha;
  j["statement_null"] = h.statement_null;
  j["statement_alt"] = h.statement_alt;
  return j;
}

Json design_to_json(const ExperimentDesign& d) {
  Json j;
  j["schema"] = kManifestSchema;
  j["variables"] = Json::array();
  for (const auto& v : d.variables) {
    Json vj;
    vj["name"] = v.name;
    vj["role"] = to_string(v.role);
    vj["domain"] = domain_to_json(v.domain);
    vj["description"] = v.description;
    j["variables"].push_back(std::move(vj));
  }
  j["factor_grid"] = Json::object();
  for (const auto* v : d.with_role(Role::independent)) {
    if (auto it = d.factor_grid.find(v->name); it != d.factor_grid.end()) {
      Json levels = Json::array();
      for (const auto& l : it->second) levels.push_back(to_json(l));
      j["factor_grid"][v->name] = std::move(levels);
    }
  }
  j["control_bindings"] = bindings_to_json(d.control_bindings);
  j["replications"] = d.replications;
  j["master_seed"] = d.master_seed;
  j["seed_count"] = d.seed_count;
  j["cv_folds"] = d.cv_folds;
  if (!d.method_factor.empty()) j["method_factor"] = d.method_factor;
  if (!d.dataset_factor.empty()) j["dataset_factor"] = d.dataset_factor;
  if (!d.data_items.empty()) {
    j["data_items"] = Json::object();
    for (const auto& [k, n] : d.data_items) j["data_items"][k] = n;
  }
  if (d.grid_subsample) j["grid_subsample"] = {{"count", d.grid_subsample->count}};
  j["hypotheses"] = Json::array();
  for (const auto& h : d.hypotheses) j["hypotheses"].push_back(hypothesis_to_json(h));
  j["attestations"] = {{"code_published", d.attestations.code_published},
                       {"environment_published", d.attestations.environment_published},
                       {"data_published", d.attestations.data_published},
                       {"model_published", d.attestations.model_published}};
  return j;
}

Manifest parse_manifest(const Json& j, std::filesystem::path path) {
  Manifest m;
  m.design = design_from_json(j);
  if (j.contains("executor")) m.executor = j["executor"];
  m.path = std::move(path);
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open manifest '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    fail(path.string(), e.what());
  }
  return parse_manifest(j, path);
}

Json trial_to_json(const Trial& t) {
  Json j;
  j["index"] = t.index;
  j["coords"] = {{"grid_point", t.coords.grid_point},
                 {"seed", t.coords.seed},
                 {"fold", t.coords.fold},
                 {"replication", t.coords.replication}};
  j["x"] = bindings_to_json(t.bindings_x);
  j["c"] = bindings_to_json(t.bindings_c);
  j["derived_seed"] = t.derived_seed;
  return j;
}

Trial trial_from_json(const Json& j) {
  Trial t;
  t.index = j.at("index").get<std::uint64_t>();
  const auto& c = j.at("coords");
  t.coords = {c.at("grid_point").get<std::uint64_t>(), c.at("seed").get<std::uint64_t>(),
              c.at("fold").get<std::uint64_t>(), c.at("replication").get<std::uint64_t>()};
  for (const auto& [k, v] : j.at("x").items()) t.bindings_x[k] = value_from_json(v);
  for (const auto& [k, v] : j.at("c").items()) t.bindings_c[k] = value_from_json(v);
  t.derived_seed = j.at("derived_seed").get<std::uint64_t>();
  return t;
}

}  // namespace veritas
