#include "veritas/stats/types.hpp"

#include <algorithm>
#include <cmath>

#include "veritas/error.hpp"

namespace veritas::stats {

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorKind::invalid_argument, "sample is empty");
  for (const double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_argument, "sample contains a non-finite value");
  }
}

PairedSamples::PairedSamples(Sample a, Sample b, std::vector<std::string> keys)
    : a_(std::move(a)), b_(std::move(b)), keys_(std::move(keys)) {
  if (a_.size() != b_.size()) throw Error(ErrorKind::invalid_argument, "paired samples differ in length");
  if (a_.size() < 2) throw Error(ErrorKind::invalid_argument, "paired samples need at least 2 pairs");
  if (keys_.empty()) {
    keys_.reserve(a_.size());
    for (std::size_t i = 0; i < a_.size(); ++i) keys_.push_back(std::to_string(i));
  }
  if (keys_.size() != a_.size()) throw Error(ErrorKind::invalid_argument, "one alignment key per pair required");
}

std::vector<double> PairedSamples::differences() const {
  std::vector<double> d(size());
  for (std::size_t i = 0; i < size(); ++i) d[i] = a_[i] - b_[i];
  return d;
}

std::string_view to_string(TestMethod m) {
  switch (m) {
    case TestMethod::paired_t: return "paired-t";
    case TestMethod::welch_t: return "welch-t";
    case TestMethod::wilcoxon_signed_rank: return "wilcoxon-signed-rank";
    case TestMethod::mann_whitney_u: return "mann-whitney-u";
    case TestMethod::ks_two_sample: return "ks-two-sample";
    case TestMethod::shapiro_wilk: return "shapiro-wilk";
    case TestMethod::levene: return "levene";
  }
  return "?";
}

std::string_view to_string(PValueMode m) {
  switch (m) {
    case PValueMode::exact: return "exact";
    case PValueMode::normal_approximation: return "normal-approximation";
    case PValueMode::asymptotic: return "asymptotic";
    case PValueMode::analytic: return "analytic";
  }
  return "?";
}

std::string_view to_string(ExactMode m) {
  switch (m) {
    case ExactMode::automatic: return "auto";
    case ExactMode::exact: return "exact";
    case ExactMode::approximate: return "approx";
  }
  return "?";
}

std::string_view to_string(EffectKind k) { return k == EffectKind::cohens_d ? "cohens-d" : "rank-biserial"; }

TestMethod parse_test_method(std::string_view s) {
  for (auto m : {TestMethod::paired_t, TestMethod::welch_t, TestMethod::wilcoxon_signed_rank,
                 TestMethod::mann_whitney_u, TestMethod::ks_two_sample, TestMethod::shapiro_wilk,
                 TestMethod::levene}) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorKind::invalid_argument, "unknown test method '" + std::string(s) + "'");
}

PValueMode parse_pvalue_mode(std::string_view s) {
  for (auto m : {PValueMode::exact, PValueMode::normal_approximation, PValueMode::asymptotic,
                 PValueMode::analytic}) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorKind::invalid_argument, "unknown p-value mode '" + std::string(s) + "'");
}

ExactMode parse_exact_mode(std::string_view s) {
  for (auto m : {ExactMode::automatic, ExactMode::exact, ExactMode::approximate}) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorKind::invalid_argument, "mode must be auto, exact or approx");
}

EffectKind parse_effect_kind(std::string_view s) {
  if (s == "cohens-d") return EffectKind::cohens_d;
  if (s == "rank-biserial") return EffectKind::rank_biserial;
  throw Error(ErrorKind::invalid_argument, "unknown effect size kind '" + std::string(s) + "'");
}

double p_from_tails(double lower, double upper, Direction direction) {
  switch (direction) {
    case Direction::greater: return std::clamp(upper, 0.0, 1.0);
    case Direction::less: return std::clamp(lower, 0.0, 1.0);
    case Direction::two_sided: break;
  }
  return std::clamp(2.0 * std::min(lower, upper), 0.0, 1.0);
}

}  // namespace veritas::stats
