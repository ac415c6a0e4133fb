#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "veritas/core/model.hpp"

namespace veritas::stats {

using veritas::Direction;

// Finite, non-empty list of observations.
class Sample {
 public:
  explicit Sample(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  std::vector<double> values_;
};

// Index-aligned pair of samples; keys carry the alignment (one per pair).
class PairedSamples {
 public:
  PairedSamples(Sample a, Sample b, std::vector<std::string> keys = {});

  const Sample& a() const noexcept { return a_; }
  const Sample& b() const noexcept { return b_; }
  std::size_t size() const noexcept { return a_.size(); }
  const std::vector<std::string>& keys() const noexcept { return keys_; }

  // a[i] - b[i]
  std::vector<double> differences() const;

 private:
  Sample a_;
  Sample b_;
  std::vector<std::string> keys_;
};

enum class TestMethod {
  paired_t,
  welch_t,
  wilcoxon_signed_rank,
  mann_whitney_u,
  ks_two_sample,
  shapiro_wilk,
  levene,
};

// How the p-value was obtained. `analytic` means the reference distribution
// (t, F) is evaluated directly; `asymptotic` covers limiting laws other than
// the normal (Kolmogorov) and Royston's transformation.
enum class PValueMode { exact, normal_approximation, asymptotic, analytic };

// Requested p-value route for the rank and KS tests.
enum class ExactMode { automatic, exact, approximate };

enum class EffectKind { cohens_d, rank_biserial };

struct EffectSize {
  EffectKind kind = EffectKind::cohens_d;
  double value = 0.0;
};

struct TestResult {
  TestMethod method = TestMethod::paired_t;
  double statistic = 0.0;
  double p_value = 1.0;
  std::vector<std::size_t> n;
  PValueMode mode = PValueMode::analytic;
  Direction direction = Direction::two_sided;
  std::optional<double> df;
  std::optional<EffectSize> effect;
  std::vector<std::string> warnings;
};

struct ConfidenceInterval {
  double level = 0.95;
  double lower = 0.0;
  double center = 0.0;
  double upper = 0.0;
};

std::string_view to_string(TestMethod m);
std::string_view to_string(PValueMode m);
std::string_view to_string(ExactMode m);
std::string_view to_string(EffectKind k);
TestMethod parse_test_method(std::string_view s);
PValueMode parse_pvalue_mode(std::string_view s);
ExactMode parse_exact_mode(std::string_view s);
EffectKind parse_effect_kind(std::string_view s);

// Exact-size limits of the automatic mode.
inline constexpr std::size_t kWilcoxonExactMaxN = 25;
inline constexpr std::size_t kMannWhitneyExactMaxProduct = 64;
inline constexpr double kKsExactMaxLabelings = 20000.0;

// Combine one-sided tails: greater -> upper, less -> lower,
// two-sided -> min(1, 2 * min(lower, upper)).
double p_from_tails(double lower, double upper, Direction direction);

}  // namespace veritas::stats
