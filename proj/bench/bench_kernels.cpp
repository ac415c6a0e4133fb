// Serial vs OpenMP exact-enumeration kernels. Both variants count the same
// space, so each benchmark also checks that they agree before timing.
#include <benchmark/benchmark.h>

#include <cstdint>
#include <cstdlib>
#include <cstdio>
#include <numeric>
#include <vector>

#include "veritas/stats/exact_kernels.hpp"

namespace {

using namespace veritas::stats::kernels;

std::vector<std::uint32_t> doubled_ranks(std::size_t n) {
  std::vector<std::uint32_t> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = static_cast<std::uint32_t>(2 * (i + 1));
  return r;
}

void require_equal(const TailCounts& serial, const TailCounts& parallel, const char* kernel) {
  if (!(serial == parallel)) {
    std::fprintf(stderr, "%s: serial and parallel counts differ\n", kernel);
    std::abort();
  }
}

Exec exec_of(const benchmark::State& state) { return state.range(1) == 0 ? Exec::serial : Exec::parallel; }

void BM_SignedRank(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ranks = doubled_ranks(n);
  const std::uint64_t observed = std::accumulate(ranks.begin(), ranks.end(), std::uint64_t{0}) / 3;
  require_equal(signed_rank_tails(ranks, observed, Exec::serial), signed_rank_tails(ranks, observed, Exec::parallel),
                "signed_rank_tails");
  for (auto _ : state) benchmark::DoNotOptimize(signed_rank_tails(ranks, observed, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << n));
}

void BM_RankSum(benchmark::State& state) {
  const auto n_a = static_cast<std::size_t>(state.range(0));
  const auto ranks = doubled_ranks(2 * n_a);
  const std::uint64_t observed = std::accumulate(ranks.begin(), ranks.begin() + n_a, std::uint64_t{0}) + 7;
  require_equal(rank_sum_tails(ranks, n_a, observed, Exec::serial), rank_sum_tails(ranks, n_a, observed, Exec::parallel),
                "rank_sum_tails");
  for (auto _ : state) benchmark::DoNotOptimize(rank_sum_tails(ranks, n_a, observed, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(binomial(2 * n_a, n_a)));
}

void BM_KsLabeling(benchmark::State& state) {
  const auto n_a = static_cast<std::size_t>(state.range(0));
  const std::vector<std::uint8_t> block_end(2 * n_a, 1);
  const std::uint64_t observed = n_a * n_a / 2;
  require_equal(ks_labeling_tails(block_end, n_a, observed, Exec::serial),
                ks_labeling_tails(block_end, n_a, observed, Exec::parallel), "ks_labeling_tails");
  for (auto _ : state) benchmark::DoNotOptimize(ks_labeling_tails(block_end, n_a, observed, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(binomial(2 * n_a, n_a)));
}

// Second argument: 0 serial, 1 parallel.
BENCHMARK(BM_SignedRank)->ArgsProduct({{12, 16, 20, 24}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RankSum)->ArgsProduct({{6, 8, 10, 12}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_KsLabeling)->ArgsProduct({{6, 8, 10, 12}, {0, 1}})->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
