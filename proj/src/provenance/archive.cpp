#include "veritas/provenance/archive.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "veritas/core/manifest.hpp"
#include "veritas/error.hpp"

namespace veritas {

namespace fs = std::filesystem;

namespace {

Json environment_to_json(const Environment& e) {
  return {{"os", e.os},
          {"cpu_model", e.cpu_model},
          {"logical_cores", e.logical_cores},
          {"total_memory", e.total_memory},
          {"harness_version", e.harness_version},
          {"command", e.command}};
}

Environment environment_from_json(const Json& j) {
  return {j.at("os").get<std::string>(),          j.at("cpu_model").get<std::string>(),
          j.at("logical_cores").get<std::string>(), j.at("total_memory").get<std::string>(),
          j.at("harness_version").get<std::string>(), j.at("command").get<std::string>()};
}

}  // namespace

Json record_to_json(const RunRecord& rec) {
  Json j;
  j["schema"] = kArchiveSchema;
  const Json t = trial_to_json(rec.trial);
  for (const auto& [k, v] : t.items()) j[k] = v;
  j["status"] = to_string(rec.status);
  if (rec.status == TrialStatus::ok) {
    j["outcomes"] = Json::object();
    for (const auto& [k, v] : rec.outcomes) j["outcomes"][k] = to_json(v);
  }
  if (rec.exit_code) j["exit_code"] = *rec.exit_code;
  if (!rec.detail.empty()) j["detail"] = rec.detail;
  j["wall_time"] = rec.wall_time;
  j["environment"] = environment_to_json(rec.environment);
  j["started_at"] = rec.started_at;
  j["finished_at"] = rec.finished_at;
  return j;
}

RunRecord record_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::invalid_argument, "record is not an object");
  if (!j.contains("schema") || j["schema"] != kArchiveSchema) {
    throw Error(ErrorKind::invalid_argument, "schema mismatch (expected " + std::string(kArchiveSchema) + ")");
  }
  try {
    RunRecord rec;
    rec.trial = trial_from_json(j);
    rec.status = parse_trial_status(j.at("status").get<std::string>());
    if (rec.status == TrialStatus::ok) {
      for (const auto& [k, v] : j.at("outcomes").items()) rec.outcomes[k] = value_from_json(v);
    } else if (j.contains("outcomes")) {
      throw Error(ErrorKind::invalid_argument, "outcomes present on a non-ok record");
    }
    if (j.contains("exit_code")) rec.exit_code = j["exit_code"].get<int>();
    if (j.contains("detail")) rec.detail = j["detail"].get<std::string>();
    rec.wall_time = j.at("wall_time").get<double>();
    rec.environment = environment_from_json(j.at("environment"));
    rec.started_at = j.at("started_at").get<std::string>();
    rec.finished_at = j.at("finished_at").get<std::string>();
    return rec;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string("malformed record: ") + e.what());
  }
}

std::string record_line(const RunRecord& rec) { return record_to_json(rec).dump(); }

void write_archive(const fs::path& path, const RunArchive& archive) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io_error, "cannot write " + tmp.string());
    for (const auto& rec : archive.records) out << record_line(rec) << '\n';
    if (!out.flush()) throw Error(ErrorKind::io_error, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::io_error, "cannot replace " + path.string() + ": " + ec.message());
}

RunArchive parse_archive(std::string_view text, std::string_view name) {
  RunArchive archive;
  std::unordered_map<std::uint64_t, std::size_t> first_line;
  std::size_t line_no = 0;
  auto corrupt = [&](const std::string& msg) {
    return Error(ErrorKind::archive_corrupt, std::string(name) + " line " + std::to_string(line_no) + ": " + msg);
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    const auto end = text.find('\n', pos);
    if (end == std::string_view::npos) throw corrupt("truncated line (no terminating newline)");
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    const Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) throw corrupt("malformed JSON");
    RunRecord rec;
    try {
      rec = record_from_json(j);
    } catch (const Error& e) {
      throw corrupt(e.message());
    }
    const auto [it, inserted] = first_line.emplace(rec.trial.index, line_no);
    if (!inserted) {
      throw corrupt("duplicate trial index " + std::to_string(rec.trial.index) + " (first at line " +
                    std::to_string(it->second) + ")");
    }
    archive.records.push_back(std::move(rec));
  }
  return archive;
}

RunArchive read_archive(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot read archive " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_archive(buf.str(), path.string());
}

std::string canonical_archive(const RunArchive& archive) {
  std::vector<const RunRecord*> sorted;
  for (const auto& rec : archive.records) sorted.push_back(&rec);
  std::sort(sorted.begin(), sorted.end(),
            [](const RunRecord* a, const RunRecord* b) { return a->trial.index < b->trial.index; });
  std::string out;
  for (const auto* rec : sorted) {
    RunRecord masked = *rec;
    masked.wall_time = 0.0;
    masked.started_at.clear();
    masked.finished_at.clear();
    out += record_line(masked);
    out += '\n';
  }
  return out;
}

std::map<TrialStatus, std::uint64_t> status_counts(const RunArchive& archive) {
  std::map<TrialStatus, std::uint64_t> counts{
      {TrialStatus::ok, 0}, {TrialStatus::failed, 0}, {TrialStatus::timeout, 0}, {TrialStatus::invalid_output, 0}};
  for (const auto& rec : archive.records) ++counts[rec.status];
  return counts;
}

}  // namespace veritas
