#pragma once

#include <cstdint>
#include <vector>

namespace veritas {

// Fisher-Yates permutation of 0..n-1 over SplitMix64(seed); see seed.hpp.
std::vector<std::uint64_t> shuffle_indices(std::uint64_t n, std::uint64_t seed);

// Rotation applied to fold labels; see seed.hpp.
std::uint64_t fold_offset(std::uint64_t k, std::uint64_t seed);

// fold[perm[p]] = (p + fold_offset(k, seed)) mod k where
// perm = shuffle_indices(n_items, seed), so fold sizes differ by at most one.
// Throws invalid_argument unless 1 <= k <= n_items.
std::vector<std::uint32_t> partition_folds(std::uint64_t n_items, std::uint64_t k, std::uint64_t seed);

}  // namespace veritas
