#include "veritas/core/value.hpp"

#include <charconv>
#include <cmath>

#include "veritas/error.hpp"

namespace veritas {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::undefined_statistic: return "undefined-statistic";
    case ErrorKind::unsupported_size: return "unsupported-size";
    case ErrorKind::degenerate_sample: return "degenerate-sample";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::alignment_error: return "alignment-error";
    case ErrorKind::archive_corrupt: return "archive-corrupt";
    case ErrorKind::internal_inconsistency: return "internal-inconsistency";
    case ErrorKind::trial_cap_exceeded: return "trial-cap-exceeded";
    case ErrorKind::invalid_manifest: return "invalid-manifest";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

std::string to_string(const Value& v) {
  struct Visitor {
    std::string operator()(double d) const {
      char buf[64];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
      return std::string(buf, end);
    }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

Json to_json(const Value& v) {
  return std::visit([](const auto& x) { return Json(x); }, v);
}

Value value_from_json(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_number_unsigned()) {
    const auto u = j.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) {
      throw Error(ErrorKind::invalid_argument, "integer value out of int64 range");
    }
    return static_cast<std::int64_t>(u);
  }
  if (j.is_number_integer()) return j.get<std::int64_t>();
  throw Error(ErrorKind::invalid_argument, "value must be a number or string, got " + j.dump());
}

std::optional<double> as_real(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::nullopt;
}

}  // namespace veritas
