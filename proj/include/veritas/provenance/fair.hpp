#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "veritas/core/value.hpp"

namespace veritas {

inline constexpr std::string_view kFairSchema = "veritas_fair_v1";

struct DatasetReference {
  std::string name;
  std::string locator;
  std::string sha256;  // lowercase hex of the file bytes

  bool operator==(const DatasetReference&) const = default;
};

struct FairDescriptor {
  std::string identifier;
  std::string title;
  std::vector<std::string> creators;
  std::string license;
  std::vector<DatasetReference> datasets;
  std::vector<std::string> keywords;
  std::string harness_version;
  std::string manifest_sha256;

  bool operator==(const FairDescriptor&) const = default;
};

Json fair_to_json(const FairDescriptor& f);
FairDescriptor fair_from_json(const Json& j);  // throws invalid_argument
FairDescriptor load_fair(const std::filesystem::path& path);

// What keeps the descriptor from supporting a FAIR claim: a missing
// identifier or license, no dataset reference, or a dataset without name,
// locator or 64-digit hex checksum. Empty means complete.
std::vector<std::string> fair_gaps(const FairDescriptor& f);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace veritas
