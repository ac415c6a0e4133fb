#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "veritas/error.hpp"
#include "veritas/stats/special.hpp"
#include "veritas/stats/tests.hpp"

namespace veritas::stats {
namespace {

// max |n_b * i - n_a * j| over the pooled points, i and j being the counts of
// a and b at or below each distinct value.
std::uint64_t scaled_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<std::int64_t>(a.size());
  const auto nb = static_cast<std::int64_t>(b.size());
  std::int64_t i = 0;
  std::int64_t j = 0;
  std::int64_t best = 0;
  while (i < na && j < nb) {
    const double v = std::min(a[i], b[j]);
    while (i < na && a[i] == v) ++i;
    while (j < nb && b[j] == v) ++j;
    best = std::max(best, std::abs(nb * i - na * j));
  }
  return static_cast<std::uint64_t>(best);
}

}  // namespace

double ks_statistic(const Sample& a, const Sample& b) {
  const std::vector<double> va(a.values().begin(), a.values().end());
  const std::vector<double> vb(b.values().begin(), b.values().end());
  return static_cast<double>(scaled_distance(va, vb)) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

TestResult ks_two_sample(const Sample& a, const Sample& b, ExactMode mode, kernels::Exec exec) {
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::vector<double> va(a.values().begin(), a.values().end());
  const std::vector<double> vb(b.values().begin(), b.values().end());
  const std::uint64_t scaled = scaled_distance(va, vb);
  const double dna = static_cast<double>(na);
  const double dnb = static_cast<double>(nb);

  TestResult r;
  r.method = TestMethod::ks_two_sample;
  r.statistic = static_cast<double>(scaled) / (dna * dnb);
  r.n = {na, nb};
  r.direction = Direction::two_sided;

  const double labelings = kernels::binomial(na + nb, na);
  const bool within_limit = labelings <= kKsExactMaxLabelings;
  const bool use_exact = mode != ExactMode::approximate && within_limit;
  if (mode == ExactMode::exact && !within_limit) {
    r.warnings.push_back("exact requested but C(n_a + n_b, n_a) exceeds 20000; asymptotic p used");
  }
  if (use_exact) {
    std::vector<double> pooled(va);
    pooled.insert(pooled.end(), vb.begin(), vb.end());
    std::sort(pooled.begin(), pooled.end());
    std::vector<std::uint8_t> block_end(pooled.size());
    for (std::size_t i = 0; i < pooled.size(); ++i) {
      block_end[i] = i + 1 == pooled.size() || pooled[i + 1] != pooled[i];
    }
    const auto counts = kernels::ks_labeling_tails(block_end, na, scaled, exec);
    r.p_value = static_cast<double>(counts.at_least) / static_cast<double>(counts.total);
    r.mode = PValueMode::exact;
    return r;
  }
  r.p_value = kolmogorov_sf(std::sqrt(dna * dnb / (dna + dnb)) * r.statistic);
  r.mode = PValueMode::asymptotic;
  if (dna * dnb / (dna + dnb) < 10.0) r.warnings.push_back("small-n: asymptotic Kolmogorov p-value");
  return r;
}

}  // namespace veritas::stats
