#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "support/audit_fixture.hpp"
#include "support/records.hpp"
#include "veritas/error.hpp"
#include "veritas/provenance/archive.hpp"
#include "veritas/provenance/checklist.hpp"
#include "veritas/provenance/fair.hpp"
#include "veritas/provenance/report.hpp"
#include "veritas/stats/descriptive.hpp"

namespace {

using namespace veritas;
using testing_support::AuditFixture;
using testing_support::compliant_fixture;
using testing_support::Rng;
using testing_support::TempDir;

RunArchive random_archive(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  RunArchive a;
  for (std::size_t i = 0; i < n; ++i) a.records.push_back(testing_support::random_record(rng, i));
  return a;
}

ErrorKind kind_of(const std::function<void()>& f, std::string* what = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (what) *what = e.what();
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::internal_inconsistency;
}

TEST(Archive, RoundTripSixtyRecords) {
  TempDir tmp;
  const auto archive = random_archive(1, 60);
  write_archive(tmp / "a.jsonl", archive);
  EXPECT_EQ(read_archive(tmp / "a.jsonl"), archive);
}

TEST(Archive, FieldOrder) {
  const auto rec = random_archive(2, 1).records[0];
  const Json j = record_to_json(rec);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  std::vector<std::string> expected = {"schema", "index", "coords", "x", "c", "derived_seed", "status"};
  if (rec.status == TrialStatus::ok) expected.push_back("outcomes");
  if (rec.exit_code) expected.push_back("exit_code");
  if (!rec.detail.empty()) expected.push_back("detail");
  for (const char* k : {"wall_time", "environment", "started_at", "finished_at"}) expected.push_back(k);
  EXPECT_EQ(keys, expected);
}

TEST(Archive, EmptyFileIsValid) {
  TempDir tmp;
  std::ofstream(tmp / "empty.jsonl").close();
  EXPECT_TRUE(read_archive(tmp / "empty.jsonl").records.empty());
}

TEST(Archive, DuplicateIndexNamesTheLine) {
  auto archive = random_archive(3, 10);
  archive.records[8].trial.index = 7;
  std::string text;
  for (const auto& r : archive.records) text += record_line(r) + "\n";
  std::string what;
  EXPECT_EQ(kind_of([&] { parse_archive(text, "a.jsonl"); }, &what), ErrorKind::archive_corrupt);
  EXPECT_NE(what.find("a.jsonl line 9: duplicate trial index 7 (first at line 8)"), std::string::npos) << what;
}

TEST(Archive, TruncatedMalformedAndForeignLines) {
  const auto archive = random_archive(4, 3);
  std::string text;
  for (const auto& r : archive.records) text += record_line(r) + "\n";
  std::string what;
  EXPECT_EQ(kind_of([&] { parse_archive(text.substr(0, text.size() - 10)); }, &what), ErrorKind::archive_corrupt);
  EXPECT_NE(what.find("line 3: truncated"), std::string::npos) << what;
  EXPECT_EQ(kind_of([&] { parse_archive(text + "{\"schema\": \n"); }, &what), ErrorKind::archive_corrupt);
  EXPECT_NE(what.find("line 4: malformed JSON"), std::string::npos) << what;
  auto j = record_to_json(archive.records[0]);
  j["schema"] = "veritas_archive_v0";
  EXPECT_EQ(kind_of([&] { parse_archive(j.dump() + "\n"); }, &what), ErrorKind::archive_corrupt);
  EXPECT_NE(what.find("line 1: schema mismatch"), std::string::npos) << what;
  EXPECT_EQ(kind_of([] { read_archive("/nonexistent/archive.jsonl"); }), ErrorKind::io_error);
}

TEST(Archive, CanonicalFormMasksTimingOnly) {
  auto a = random_archive(5, 20);
  auto b = a;
  for (auto& r : b.records) {
    r.wall_time += 1.0;
    r.started_at = "x";
    r.finished_at = "y";
  }
  std::reverse(b.records.begin(), b.records.end());
  EXPECT_EQ(canonical_archive(a), canonical_archive(b));
  b.records[0].detail += "!";
  b.records[0].status = TrialStatus::failed;
  b.records[0].outcomes.clear();
  EXPECT_NE(canonical_archive(a), canonical_archive(b));
}

TEST(Archive, StatusCountsCoverEveryStatus) {
  RunArchive a;
  const auto counts = status_counts(a);
  EXPECT_EQ(counts.size(), 4u);
  for (const auto& [s, n] : counts) EXPECT_EQ(n, 0u);
}

class Report : public ::testing::Test {
 protected:
  AuditFixture fx_ = compliant_fixture();
};

TEST_F(Report, Deterministic) {
  const auto analysis = selector::analyze(fx_.design, fx_.archive.records);
  const auto r1 = generate_report(fx_.design, fx_.archive, analysis);
  const auto r2 = generate_report(fx_.design, fx_.archive, analysis);
  EXPECT_EQ(canonical_report(r1).dump(), canonical_report(r2).dump());
  EXPECT_EQ(r1["schema"], kReportSchema);
}

TEST_F(Report, CellsRecomputeFromArchive) {
  const auto& cells = fx_.report["cells"];
  ASSERT_EQ(cells.size(), 8u);
  for (const auto& c : cells) {
    std::vector<double> values;
    for (const auto& r : fx_.archive.records) {
      if (r.trial.coords.grid_point == c["grid_point"].get<std::uint64_t>()) {
        values.push_back(std::get<double>(r.outcomes.at("score")));
      }
    }
    ASSERT_EQ(c["n"].get<std::size_t>(), values.size());
    const auto d = stats::describe(stats::Sample(values));
    EXPECT_EQ(c["mean"].get<double>(), d.mean);
    EXPECT_EQ(c["variance"].get<double>(), *d.variance);
    EXPECT_EQ(c["sd"].get<double>(), *d.sd);
    EXPECT_LE(c["ci"]["lower"].get<double>(), c["mean"].get<double>());
    EXPECT_GE(c["ci"]["upper"].get<double>(), c["mean"].get<double>());
  }
}

TEST_F(Report, ConstantOutcomesGiveZeroWidthIntervals) {
  for (auto& r : fx_.archive.records) r.outcomes["score"] = 0.75;
  const auto analysis = selector::analyze(fx_.design, fx_.archive.records);
  const auto report = generate_report(fx_.design, fx_.archive, analysis);
  for (const auto& c : report["cells"]) {
    EXPECT_EQ(c["sd"].get<double>(), 0.0);
    EXPECT_EQ(c["ci"]["lower"].get<double>(), 0.75);
    EXPECT_EQ(c["ci"]["upper"].get<double>(), 0.75);
  }
  EXPECT_NE(render_text(report).find("sd=0  ci=[0.75, 0.75]"), std::string::npos);
}

TEST_F(Report, DesignSummary) {
  fx_.archive.records[3].status = TrialStatus::timeout;
  fx_.archive.records[3].outcomes.clear();
  const auto report = generate_report(fx_.design, fx_.archive, selector::analyze(fx_.design, fx_.archive.records));
  EXPECT_EQ(report["design"]["trials"], 64);
  EXPECT_EQ(report["design"]["status"]["ok"], 63);
  EXPECT_EQ(report["design"]["status"]["timeout"], 1);
  EXPECT_EQ(report["design"]["total_wall_time"].get<double>(), 64.0);
  EXPECT_EQ(report["design"]["environments"].size(), 1u);
  EXPECT_EQ(canonical_report(report)["design"]["total_wall_time"].get<double>(), 0.0);
}

TEST_F(Report, VerdictCarriesTrace) {
  const auto& v = fx_.report["verdicts"].at(0);
  EXPECT_EQ(v["hypothesis"], "H1");
  for (const char* k : {"alpha_pre", "normality_p", "variance_p", "classification", "chosen", "applied", "rationale"}) {
    EXPECT_TRUE(v["trace"].contains(k)) << k;
  }
  EXPECT_EQ(v["decision"] == "reject-H0", v["p_value"].get<double>() < v["alpha"].get<double>());
}

TEST_F(Report, TextNumbersMatchStructuredValues) {
  const auto text = render_text(fx_.report);
  for (const auto& c : fx_.report["cells"]) {
    EXPECT_NE(text.find("mean=" + format_number(c["mean"].get<double>())), std::string::npos);
    EXPECT_NE(text.find("sd=" + format_number(c["sd"].get<double>())), std::string::npos);
  }
  const auto& v = fx_.report["verdicts"][0];
  EXPECT_NE(text.find("p=" + format_number(v["p_value"].get<double>())), std::string::npos);
  EXPECT_EQ(format_number(0.123456789), "0.123457");
  EXPECT_EQ(format_number(1234567.0), "1.23457e+06");
}

TEST_F(Report, UnknownHypothesisIsInconsistent) {
  auto analysis = selector::analyze(fx_.design, fx_.archive.records);
  analysis.verdicts[0].hypothesis_id = "H9";
  EXPECT_EQ(kind_of([&] { generate_report(fx_.design, fx_.archive, analysis); }),
            ErrorKind::internal_inconsistency);
}

TEST(Fair, Sha256KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  TempDir tmp;
  std::ofstream(tmp / "f", std::ios::binary) << "abc";
  EXPECT_EQ(sha256_file(tmp / "f"), sha256_hex("abc"));
}

TEST(Fair, RoundTripAndGaps) {
  const auto f = testing_support::complete_fair();
  EXPECT_EQ(fair_from_json(fair_to_json(f)), f);
  EXPECT_TRUE(fair_gaps(f).empty());
  auto g = f;
  g.identifier.clear();
  g.datasets[1].sha256 = "ABC";
  const auto gaps = fair_gaps(g);
  ASSERT_EQ(gaps.size(), 2u);
  EXPECT_EQ(gaps[0], "identifier missing");
  g.datasets.clear();
  EXPECT_EQ(fair_gaps(g).back(), "no dataset reference");
  EXPECT_EQ(kind_of([] { fair_from_json(Json{{"schema", "other"}}); }), ErrorKind::invalid_argument);
}

std::set<std::size_t> failing(const ChecklistReport& r) {
  std::set<std::size_t> out;
  for (const auto& item : r.items) {
    if (item.status == ItemStatus::fail) out.insert(item.number);
  }
  return out;
}

TEST(Checklist, CompliantFixture) {
  const auto fx = compliant_fixture();
  const auto report = audit_checklist(fx.inputs());
  ASSERT_EQ(report.items.size(), 16u);
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_EQ(report.items[i].number, i + 1);
    EXPECT_EQ(report.items[i].title, kChecklistItems[i]);
    EXPECT_EQ(report.items[i].status, i < 12 ? ItemStatus::pass : ItemStatus::manual_attestation)
        << i + 1 << ": " << report.items[i].note;
    EXPECT_FALSE(report.items[i].evidence.empty());
  }
  EXPECT_TRUE(report.passed());
}

TEST(Checklist, ReplicationsOneFlipsOnlyReruns) {
  auto fx = compliant_fixture();
  fx.design.replications = 1;
  const auto report = audit_checklist(fx.inputs());
  EXPECT_EQ(failing(report), std::set<std::size_t>{7});
  EXPECT_EQ(report.items[6].title, "Replication runs (re-runs) performed");
  EXPECT_FALSE(report.passed());
}

TEST(Checklist, MutationMatrix) {
  for (const auto& m : testing_support::checklist_mutations()) {
    auto fx = compliant_fixture();
    m.apply(fx);
    EXPECT_EQ(failing(audit_checklist(fx.inputs())), std::set<std::size_t>{m.item}) << "mutation " << m.item;
  }
}

TEST(Checklist, ArchiveEvidenceRequired) {
  auto fx = compliant_fixture();
  for (auto& r : fx.archive.records) {
    if (r.trial.coords.seed == 1) {
      r.status = TrialStatus::failed;
      r.outcomes.clear();
    }
  }
  EXPECT_EQ(failing(audit_checklist(fx.inputs())), std::set<std::size_t>{8});
}

TEST(Checklist, MissingInputsFailTheirItems) {
  const auto fx = compliant_fixture();
  auto in = fx.inputs();
  in.archive = nullptr;
  EXPECT_EQ(failing(audit_checklist(in)), (std::set<std::size_t>{7, 8, 9}));
  in = fx.inputs();
  in.report = nullptr;
  EXPECT_EQ(failing(audit_checklist(in)), (std::set<std::size_t>{11, 12}));
  in = fx.inputs();
  in.fair = nullptr;
  EXPECT_EQ(failing(audit_checklist(in)), std::set<std::size_t>{15});
  EXPECT_EQ(failing(audit_checklist({})).size(), 16u);
}

// Adding an input or removing a mutation never turns a pass into a fail.
TEST(Checklist, Monotone) {
  auto passes = [](const ChecklistReport& r) {
    std::set<std::size_t> out;
    for (const auto& item : r.items) {
      if (item.status != ItemStatus::fail) out.insert(item.number);
    }
    return out;
  };
  const auto mutations = testing_support::checklist_mutations();
  for (std::size_t mask = 0; mask < 8; ++mask) {
    auto fx = compliant_fixture();
    for (std::size_t i = 0; i < mutations.size(); ++i) {
      if ((i * 7 + mask) % 3 == 0) mutations[i].apply(fx);
    }
    for (std::size_t subset = 0; subset < 8; ++subset) {
      AuditInputs less{&fx.design, subset & 1 ? &fx.archive : nullptr, subset & 2 ? &fx.report : nullptr,
                       subset & 4 ? &fx.fair : nullptr};
      const auto before = passes(audit_checklist(less));
      const auto after = passes(audit_checklist(fx.inputs()));
      for (const auto n : before) EXPECT_TRUE(after.contains(n)) << "item " << n << " mask " << mask;
    }
  }
}

TEST(Checklist, JsonAndTable) {
  auto fx = compliant_fixture();
  fx.design.seed_count = 1;
  const auto report = audit_checklist(fx.inputs());
  const auto j = checklist_to_json(report);
  EXPECT_EQ(j["items"].size(), 16u);
  EXPECT_EQ(j["passed"], false);
  EXPECT_EQ(j["items"][7]["status"], "fail");
  EXPECT_EQ(j["items"][12]["status"], "manual-attestation");
  const auto table = render_checklist(report);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 16);
  EXPECT_NE(table.find("All random seeds set and multiple values tested"), std::string::npos);
}

}  // namespace
