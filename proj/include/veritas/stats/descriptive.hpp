#pragma once

#include <optional>
#include <span>

#include "veritas/stats/types.hpp"

namespace veritas::stats {

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> variance;  // unbiased; absent for n = 1
  std::optional<double> sd;
};

// Two-pass: mean first, then centered second moment with the
// (sum of deviations)^2 / n correction term.
double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // throws undefined_statistic for n < 2

Summary describe(const Sample& s);

// mean +/- t_{(1+level)/2, n-1} * sd / sqrt(n)
ConfidenceInterval confidence_interval(const Sample& s, double level);

double median(std::span<const double> xs);

// Average ranks (1-based) with ties sharing the mean of their positions.
// `tie_sizes` receives the size of every tie group with more than one member.
std::vector<double> average_ranks(std::span<const double> xs, std::vector<std::size_t>* tie_sizes = nullptr);

}  // namespace veritas::stats
