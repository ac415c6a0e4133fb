#pragma once

#include <filesystem>
#include <string_view>

#include "veritas/core/model.hpp"
#include "veritas/core/value.hpp"

namespace veritas {

inline constexpr std::string_view kManifestSchema = "veritas_manifest_v1";

struct Manifest {
  ExperimentDesign design;
  Json executor;  // raw "executor" section, parsed by the orchestrator
  std::filesystem::path path;
};

// Structural parse only; semantic checks live in validate_design. Throws
// Error(invalid_manifest) naming the offending field path.
ExperimentDesign design_from_json(const Json& j);
Json design_to_json(const ExperimentDesign& design);

Manifest parse_manifest(const Json& j, std::filesystem::path path = {});
Manifest load_manifest(const std::filesystem::path& path);

Json hypothesis_to_json(const Hypothesis& h);
Json trial_to_json(const Trial& t);
Trial trial_from_json(const Json& j);

}  // namespace veritas
