#include "veritas/core/seed.hpp"

#include <numeric>
#include <utility>

namespace veritas {

std::uint64_t SplitMix64::below(std::uint64_t bound) noexcept {
  if (bound <= 1) return 0;
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = (*this)();
    if (r >= threshold) return r % bound;
  }
}

std::vector<std::uint64_t> fisher_yates(std::uint64_t n, std::uint64_t seed) {
  std::vector<std::uint64_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::uint64_t{0});
  SplitMix64 rng(seed);
  for (std::uint64_t i = n; i-- > 1;) {
    std::swap(perm[i], perm[rng.below(i + 1)]);
  }
  return perm;
}

}  // namespace veritas
