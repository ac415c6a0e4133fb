#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "veritas/core/value.hpp"
#include "veritas/orchestrator/record.hpp"

namespace veritas {

inline constexpr std::string_view kArchiveSchema = "veritas_archive_v1";

struct RunArchive {
  std::vector<RunRecord> records;

  bool operator==(const RunArchive&) const = default;
};

// Field order: schema, index, coords, x, c, derived_seed, status,
// outcomes (ok only), exit_code (when known), detail (when non-empty),
// wall_time, environment, started_at, finished_at.
Json record_to_json(const RunRecord& rec);
RunRecord record_from_json(const Json& j);

// One compact JSON document without the trailing newline.
std::string record_line(const RunRecord& rec);

// Replaces the file atomically (temporary file + rename).
void write_archive(const std::filesystem::path& path, const RunArchive& archive);

// Throws archive_corrupt naming the line for a schema mismatch, malformed or
// truncated line, or duplicate trial index; io_error if unreadable. An empty
// file is a valid empty archive.
RunArchive read_archive(const std::filesystem::path& path);
RunArchive parse_archive(std::string_view text, std::string_view name = "archive");

// Records sorted by trial index with started_at, finished_at and wall_time
// masked, one line each. Equal strings mean equal canonical content.
std::string canonical_archive(const RunArchive& archive);

std::map<TrialStatus, std::uint64_t> status_counts(const RunArchive& archive);

}  // namespace veritas
