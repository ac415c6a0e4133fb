#include "veritas/stats/exact_kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "veritas/error.hpp"

namespace veritas::stats::kernels {
namespace {

// Advance a sorted index tuple within [.., n) to the next combination in
// lexicographic order; false once exhausted.
bool next_combination(std::span<std::size_t> idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

void tally(TailCounts& c, std::uint64_t stat, std::uint64_t observed) {
  c.at_most += stat <= observed;
  c.at_least += stat >= observed;
}

std::uint64_t rank_sum(std::span<const std::uint32_t> ranks2, std::span<const std::size_t> idx) {
  std::uint64_t s = 0;
  for (const auto i : idx) s += ranks2[i];
  return s;
}

std::uint64_t ks_scaled(std::span<const std::uint8_t> block_end, std::span<const std::size_t> idx,
                        std::size_t n_a, std::size_t n_b) {
  std::int64_t ca = 0;
  std::int64_t cb = 0;
  std::int64_t best = 0;
  std::size_t p = 0;
  for (std::size_t i = 0; i < block_end.size(); ++i) {
    if (p < idx.size() && idx[p] == i) {
      ++ca;
      ++p;
    } else {
      ++cb;
    }
    if (block_end[i]) {
      best = std::max(best, std::abs(static_cast<std::int64_t>(n_b) * ca - static_cast<std::int64_t>(n_a) * cb));
    }
  }
  return static_cast<std::uint64_t>(best);
}

void check_combination_args(std::size_t n, std::size_t k) {
  if (k == 0 || k >= n) throw Error(ErrorKind::invalid_argument, "both groups must be non-empty");
}

// Serial: one lexicographic walk over every k-subset of [0, n).
template <typename Stat>
TailCounts combinations_serial(std::size_t n, std::size_t k, std::uint64_t observed, Stat stat) {
  TailCounts c;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  do {
    tally(c, stat(idx), observed);
    ++c.total;
  } while (next_combination(idx, n));
  return c;
}

// Parallel: chunk by the smallest chosen index; each chunk walks the
// (k-1)-subsets of the positions above it.
template <typename Stat>
TailCounts combinations_parallel(std::size_t n, std::size_t k, std::uint64_t observed, Stat stat) {
  std::uint64_t at_most = 0;
  std::uint64_t at_least = 0;
  std::uint64_t total = 0;
  const auto chunks = static_cast<std::int64_t>(n - k + 1);
#pragma omp parallel for schedule(dynamic) reduction(+ : at_most, at_least, total)
  for (std::int64_t first = 0; first < chunks; ++first) {
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), static_cast<std::size_t>(first));
    const std::span<std::size_t> tail(idx.data() + 1, k - 1);
    do {
      const auto s = stat(idx);
      at_most += s <= observed;
      at_least += s >= observed;
      ++total;
    } while (next_combination(tail, n));
  }
  return TailCounts{at_most, at_least, total};
}

}  // namespace

TailCounts signed_rank_tails(std::span<const std::uint32_t> ranks2, std::uint64_t observed2, Exec exec) {
  const std::size_t n = ranks2.size();
  if (n > 40) throw Error(ErrorKind::unsupported_size, "sign enumeration limited to n <= 40");
  if (n == 0) {
    TailCounts c{0, 0, 1};
    tally(c, 0, observed2);
    return c;
  }

  // Gray-code walk over the low `bits` ranks starting from `base`: step i
  // flips rank ctz(i), so every mask is visited with O(1) work.
  auto walk = [&](std::size_t bits, std::uint64_t base, std::uint64_t& at_most, std::uint64_t& at_least) {
    std::uint64_t sum = base;
    at_most += sum <= observed2;
    at_least += sum >= observed2;
    const std::uint64_t steps = std::uint64_t{1} << bits;
    for (std::uint64_t i = 1; i < steps; ++i) {
      const int bit = std::countr_zero(i);
      const std::uint64_t gray = i ^ (i >> 1);
      if ((gray >> bit) & 1u) {
        sum += ranks2[bit];
      } else {
        sum -= ranks2[bit];
      }
      at_most += sum <= observed2;
      at_least += sum >= observed2;
    }
  };

  std::uint64_t at_most = 0;
  std::uint64_t at_least = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  if (exec == Exec::serial) {
    walk(n, 0, at_most, at_least);
    return TailCounts{at_most, at_least, total};
  }

  const std::size_t high = std::min<std::size_t>(n, 8);
  const std::size_t low = n - high;
  const auto chunks = static_cast<std::int64_t>(std::uint64_t{1} << high);
#pragma omp parallel for schedule(static) reduction(+ : at_most, at_least)
  for (std::int64_t chunk = 0; chunk < chunks; ++chunk) {
    std::uint64_t base = 0;
    for (std::size_t b = 0; b < high; ++b) {
      if ((static_cast<std::uint64_t>(chunk) >> b) & 1u) base += ranks2[low + b];
    }
    std::uint64_t m = 0;
    std::uint64_t g = 0;
    walk(low, base, m, g);
    at_most += m;
    at_least += g;
  }
  return TailCounts{at_most, at_least, total};
}

TailCounts rank_sum_tails(std::span<const std::uint32_t> ranks2, std::size_t n_a, std::uint64_t observed2,
                          Exec exec) {
  const std::size_t n = ranks2.size();
  check_combination_args(n, n_a);
  auto stat = [&](std::span<const std::size_t> idx) { return rank_sum(ranks2, idx); };
  return exec == Exec::serial ? combinations_serial(n, n_a, observed2, stat)
                              : combinations_parallel(n, n_a, observed2, stat);
}

TailCounts ks_labeling_tails(std::span<const std::uint8_t> block_end, std::size_t n_a,
                             std::uint64_t observed_scaled, Exec exec) {
  const std::size_t n = block_end.size();
  check_combination_args(n, n_a);
  const std::size_t n_b = n - n_a;
  auto stat = [&](std::span<const std::size_t> idx) { return ks_scaled(block_end, idx, n_a, n_b); };
  return exec == Exec::serial ? combinations_serial(n, n_a, observed_scaled, stat)
                              : combinations_parallel(n, n_a, observed_scaled, stat);
}

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

}  // namespace veritas::stats::kernels
