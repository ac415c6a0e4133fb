#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

// Exact null-distribution enumeration for the rank and KS tests.
//
// Every kernel exists twice: a serial reference that walks the whole space
// in one loop, and an OpenMP version that splits the space into independent
// chunks. Both count with integers, so their results must agree exactly;
// the test suite and bench/ compare them.
//
// Ranks are passed doubled (2 * rank) so average ranks of ties stay integral.
namespace veritas::stats::kernels {

enum class Exec { serial, parallel };

struct TailCounts {
  std::uint64_t at_most = 0;   // statistic <= observed
  std::uint64_t at_least = 0;  // statistic >= observed
  std::uint64_t total = 0;

  bool operator==(const TailCounts&) const = default;
};

// Over all 2^n sign assignments: W+ (doubled) = sum of ranks2 with a + sign.
// n <= 40.
TailCounts signed_rank_tails(std::span<const std::uint32_t> ranks2, std::uint64_t observed2, Exec exec);

// Over all C(N, n_a) choices of group-a positions: the doubled rank sum of
// group a. N <= 64.
TailCounts rank_sum_tails(std::span<const std::uint32_t> ranks2, std::size_t n_a, std::uint64_t observed2,
                          Exec exec);

// Over all C(N, n_a) labelings of the pooled sorted sample: the scaled KS
// distance max |n_b * c_a - n_a * c_b|, evaluated only where block_end[i] is
// true (last element of a run of tied values). Only at_least is meaningful.
// N <= 64.
TailCounts ks_labeling_tails(std::span<const std::uint8_t> block_end, std::size_t n_a,
                             std::uint64_t observed_scaled, Exec exec);

// Binomial coefficient as double (exact below 2^53).
double binomial(std::size_t n, std::size_t k);

}  // namespace veritas::stats::kernels
