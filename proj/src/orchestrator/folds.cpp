#include "veritas/orchestrator/folds.hpp"

#include <string>

#include "veritas/core/seed.hpp"
#include "veritas/error.hpp"

namespace veritas {

std::vector<std::uint64_t> shuffle_indices(std::uint64_t n, std::uint64_t seed) { return fisher_yates(n, seed); }

std::uint64_t fold_offset(std::uint64_t k, std::uint64_t seed) {
  if (k < 1) throw Error(ErrorKind::invalid_argument, "fold count must be >= 1");
  SplitMix64 g(seed ^ kFoldTag);
  return g.below(k);
}

std::vector<std::uint32_t> partition_folds(std::uint64_t n_items, std::uint64_t k, std::uint64_t seed) {
  if (k < 1 || k > n_items) {
    throw Error(ErrorKind::invalid_argument,
                "fold count " + std::to_string(k) + " outside [1, " + std::to_string(n_items) + "]");
  }
  const auto perm = shuffle_indices(n_items, seed);
  const auto offset = fold_offset(k, seed);
  std::vector<std::uint32_t> fold(n_items);
  for (std::uint64_t p = 0; p < n_items; ++p) fold[perm[p]] = static_cast<std::uint32_t>((p + offset) % k);
  return fold;
}

}  // namespace veritas
