#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "json.hpp"

namespace veritas {

using Json = nlohmann::ordered_json;

// A bound value of an experiment variable. Reals serialize as JSON floats,
// integers as JSON integers, categorical levels as strings, so the JSON type
// alone recovers the alternative.
using Value = std::variant<double, std::int64_t, std::string>;

std::string to_string(const Value& v);
Json to_json(const Value& v);
Value value_from_json(const Json& j);

// Numeric view for metrics; nullopt for categorical values.
std::optional<double> as_real(const Value& v);

}  // namespace veritas
