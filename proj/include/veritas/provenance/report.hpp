#pragma once

#include <string>
#include <string_view>

#include "veritas/core/value.hpp"
#include "veritas/provenance/archive.hpp"
#include "veritas/selector/selector.hpp"

namespace veritas {

inline constexpr std::string_view kReportSchema = "veritas_report_v1";

struct ReportOptions {
  double ci_level = 0.95;
  double alpha_pre = selector::kAlphaPre;
  std::string generated_at;  // current time when empty
};

Json test_result_to_json(const stats::TestResult& r);
Json verdict_to_json(const selector::Verdict& v, const Hypothesis& h);

// Structured report: status counts, wall time and environments per design;
// mean, sd and CI per (grid point, metric) cell over ok records; one entry
// per verdict with its full selection trace. Throws internal_inconsistency
// for a verdict whose hypothesis is not in the design.
Json generate_report(const ExperimentDesign& design, const RunArchive& archive, const selector::Analysis& analysis,
                     const ReportOptions& options = {});

// Text rendering of a structured report; every number printed with %.6g.
std::string render_text(const Json& report);

std::string format_number(double x);

// generated_at and total_wall_time masked.
Json canonical_report(Json report);

}  // namespace veritas
