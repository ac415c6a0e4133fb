#pragma once

#include <cstdint>
#include <vector>

#include "veritas/core/model.hpp"

// Seed derivation and the harness PRNG. Everything here is bit-exact and
// must not change between releases; the constants are those of SplitMix64.
//
//   kGamma = 0x9e3779b97f4a7c15
//   mix64(z):  z ^= z >> 30;  z *= 0xbf58476d1ce4e5b9;
//              z ^= z >> 27;  z *= 0x94d049bb133111eb;
//              z ^= z >> 31;
//
//   derive_seed(master, (g, s, f, r)):
//     h = mix64(master + kGamma)
//     for i, c in enumerate((g, s, f, r)):   // i = 0..3
//       h = mix64(h ^ (c + kGamma * (i + 1)))
//     return h
//
// All arithmetic wraps modulo 2^64. mix64 is a bijection, so two coordinate
// tuples that differ in exactly one position (or two masters with equal
// coordinates) can never map to the same seed.
//
//   data_seed(master, s) = derive_seed(master ^ kDataTag, (0, s, 0, 0))
//   kDataTag = 0x6461746173656564 ("dataseed")
//
// data_seed drives shuffling and fold assignment; it depends only on the seed
// index so every method, fold and replication sees the same partition.
//
//   grid_seed(master) = derive_seed(master ^ kGridTag, (0, 0, 0, 0))
//   kGridTag = 0x6772696473616d70 ("gridsamp")
//
// Fisher-Yates over SplitMix64(seed):
//   perm = [0, 1, ..., n-1]
//   for i = n-1 down to 1: j = below(i + 1); swap(perm[i], perm[j])
//
// k-fold assignment of n items under seed:
//   offset = SplitMix64(seed ^ kFoldTag).below(k)
//   kFoldTag = 0x666f6c646f666673 ("foldoffs")
//   fold[perm[p]] = (p + offset) mod k,  perm = fisher_yates(n, seed)
// The offset rotates which folds receive the extra items when k does not
// divide n, so every item is equally likely to land in every fold.
namespace veritas {

inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
inline constexpr std::uint64_t kDataTag = 0x6461746173656564ULL;
inline constexpr std::uint64_t kGridTag = 0x6772696473616d70ULL;
inline constexpr std::uint64_t kFoldTag = 0x666f6c646f666673ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t derive_seed(std::uint64_t master_seed, const TrialCoords& coords) noexcept {
  std::uint64_t h = mix64(master_seed + kGamma);
  const auto c = coords.as_array();
  for (std::uint64_t i = 0; i < c.size(); ++i) {
    h = mix64(h ^ (c[i] + kGamma * (i + 1)));
  }
  return h;
}

constexpr std::uint64_t data_seed(std::uint64_t master_seed, std::uint64_t seed_index) noexcept {
  return derive_seed(master_seed ^ kDataTag, TrialCoords{0, seed_index, 0, 0});
}

constexpr std::uint64_t grid_seed(std::uint64_t master_seed) noexcept {
  return derive_seed(master_seed ^ kGridTag, TrialCoords{});
}

// SplitMix64: state += kGamma; return mix64(state).
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t operator()() noexcept {
    state_ += kGamma;
    return mix64(state_);
  }

  // Uniform integer in [0, bound) by rejection:
  //   threshold = (2^64 - bound) mod bound
  //   draw r until r >= threshold; return r mod bound
  std::uint64_t below(std::uint64_t bound) noexcept;

  // Uniform double in [0, 1) from the top 53 bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  static constexpr std::uint64_t min() noexcept { return 0; }
  static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }

 private:
  std::uint64_t state_;
};

std::vector<std::uint64_t> fisher_yates(std::uint64_t n, std::uint64_t seed);

}  // namespace veritas
