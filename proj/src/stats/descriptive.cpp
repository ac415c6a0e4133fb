#include "veritas/stats/descriptive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "veritas/error.hpp"
#include "veritas/stats/special.hpp"

namespace veritas::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorKind::undefined_statistic, "mean of empty sample");
  double sum = 0.0;
  for (const double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw Error(ErrorKind::undefined_statistic, "variance needs at least 2 values");
  const double m = mean(xs);
  double ss = 0.0;
  double comp = 0.0;
  for (const double x : xs) {
    const double dev = x - m;
    ss += dev * dev;
    comp += dev;
  }
  const double n = static_cast<double>(xs.size());
  return std::max(0.0, (ss - comp * comp / n) / (n - 1.0));
}

Summary describe(const Sample& s) {
  Summary out;
  out.n = s.size();
  out.mean = mean(s.values());
  if (s.size() >= 2) {
    out.variance = variance(s.values());
    out.sd = std::sqrt(*out.variance);
  }
  return out;
}

ConfidenceInterval confidence_interval(const Sample& s, double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::invalid_argument, "CI level must lie in (0, 1)");
  if (s.size() < 2) throw Error(ErrorKind::undefined_statistic, "confidence interval needs n >= 2");
  const auto d = describe(s);
  const double n = static_cast<double>(s.size());
  const double q = t_quantile(0.5 * (1.0 + level), n - 1.0);
  const double half = q * *d.sd / std::sqrt(n);
  return ConfidenceInterval{level, d.mean - half, d.mean, d.mean + half};
}

double median(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorKind::undefined_statistic, "median of empty sample");
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> average_ranks(std::span<const double> xs, std::vector<std::size_t>* tie_sizes) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && xs[order[j]] == xs[order[i]]) ++j;
    // positions i..j-1 hold ranks i+1..j
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    if (tie_sizes && j - i > 1) tie_sizes->push_back(j - i);
    i = j;
  }
  return ranks;
}

}  // namespace veritas::stats
