#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "veritas/core/model.hpp"
#include "veritas/error.hpp"
#include "veritas/orchestrator/record.hpp"
#include "veritas/stats/tests.hpp"

// Test selection as a decision procedure:
//
//   distribution   variances   tests
//   normal         equal       paired-t
//   normal         unequal     welch-t
//   not-normal     any         wilcoxon-signed-rank
//   mixed          any         mann-whitney-u (decides), ks-two-sample (advisory)
//
// Pre-tests are Shapiro-Wilk per group and Brown-Forsythe Levene, both at
// alpha_pre. Unpaired hypotheses swap paired-t for welch-t and Wilcoxon for
// Mann-Whitney U; every substitution is written to the trace.
namespace veritas::selector {

using stats::Sample;
using stats::TestMethod;
using stats::TestResult;

inline constexpr double kAlphaPre = 0.05;

enum class Distribution { normal, not_normal, mixed };
enum class Variances { equal, unequal, any };

std::string_view to_string(Distribution d);
std::string_view to_string(Variances v);

struct Classification {
  Distribution distribution = Distribution::normal;
  Variances variances = Variances::any;

  bool operator==(const Classification&) const = default;
};

struct SelectionTrace {
  double alpha_pre = kAlphaPre;
  std::optional<double> normality_p_a;  // Shapiro-Wilk
  std::optional<double> normality_p_b;
  std::optional<double> variance_p;     // Levene
  Classification classification;
  std::vector<TestMethod> chosen;   // mapping of the classification
  std::vector<TestMethod> applied;  // tests actually run, primary first
  std::vector<std::string> rationale;
};

// Throws insufficient_data when either group has fewer than 3 values. A
// group whose Shapiro-Wilk statistic is undefined (constant values, n > 5000)
// counts as not normal.
Classification classify(const Sample& a, const Sample& b, double alpha_pre = kAlphaPre,
                        SelectionTrace* trace = nullptr);

std::vector<TestMethod> select_test(const Classification& c);

enum class Decision { reject_h0, fail_to_reject_h0 };

std::string_view to_string(Decision d);

// Strict: reject iff p < alpha.
constexpr Decision decide(double p, double alpha) {
  return p < alpha ? Decision::reject_h0 : Decision::fail_to_reject_h0;
}

struct GroupStats {
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> sd;
  std::optional<stats::ConfidenceInterval> ci;
};

struct Verdict {
  std::string hypothesis_id;
  std::string metric;
  Pairing pairing = Pairing::paired;
  Direction direction = Direction::two_sided;
  double alpha = 0.05;
  TestResult primary;
  std::optional<TestResult> secondary;  // KS for the mixed row
  std::optional<double> p_adjusted;     // Holm, when requested
  Decision decision = Decision::fail_to_reject_h0;
  std::optional<stats::EffectSize> effect;
  GroupStats group_a;
  GroupStats group_b;
  SelectionTrace trace;
};

struct AnalysisOptions {
  std::optional<double> alpha;  // replaces every hypothesis alpha
  stats::ExactMode mode = stats::ExactMode::automatic;
  double ci_level = 0.95;
  double alpha_pre = kAlphaPre;
  bool holm = false;
  stats::kernels::Exec exec = stats::kernels::Exec::parallel;
};

// Values entering a test: one per pair key, replications averaged. The pair
// key is every independent binding outside the hypothesis selectors plus the
// seed and fold indices.
struct GroupValues {
  std::vector<std::string> keys;
  std::vector<double> values;
};

struct HypothesisData {
  GroupValues a;
  GroupValues b;
};

// For paired hypotheses the B values are aligned to the A keys. Throws
// alignment_error listing unmatched keys, insufficient_data when a group has
// no ok record.
HypothesisData extract_groups(const Hypothesis& h, const ExperimentDesign& design,
                              std::span<const RunRecord> records);

std::string pair_key(const Hypothesis& h, const Trial& trial);

// Requires at least 3 values per group (insufficient_data otherwise).
Verdict evaluate_hypothesis(const Hypothesis& h, const ExperimentDesign& design, std::span<const RunRecord> records,
                            const AnalysisOptions& options = {});

struct HypothesisError {
  std::string hypothesis_id;
  ErrorKind kind;
  std::string message;
};

struct Analysis {
  std::vector<Verdict> verdicts;
  std::vector<HypothesisError> errors;
};

// Evaluates every hypothesis; insufficient_data and alignment_error are
// collected per hypothesis, other errors propagate. With options.holm the
// decisions use Holm-adjusted p-values across the evaluated hypotheses.
Analysis analyze(const ExperimentDesign& design, std::span<const RunRecord> records,
                 const AnalysisOptions& options = {});

}  // namespace veritas::selector
