#pragma once

#include <vector>

#include "support/random.hpp"
#include "veritas/stats/special.hpp"

// Sample constructions for the selection rows.
namespace testing_support {

// One normal draw per probability stratum ((i + U_i) / n), returned in
// shuffled order: a normal sample with little sampling noise in its shape.
inline std::vector<double> stratified_normals(Rng& rng, std::size_t n, double mean = 0.0, double sd = 1.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = 0.0;
    while (u <= 0.0) u = rng.uniform();
    v[i] = mean + sd * veritas::stats::normal_quantile((static_cast<double>(i) + u) / static_cast<double>(n));
  }
  for (std::size_t i = n; i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
  return v;
}

struct RowSamples {
  std::vector<double> a;
  std::vector<double> b;
};

// row 0: normal/equal, 1: normal/unequal, 2: not-normal, 3: mixed.
inline RowSamples row_samples(int row, std::uint64_t seed, std::size_t n = 60) {
  Rng rng(seed);
  switch (row) {
    case 0: {
      auto a = stratified_normals(rng, n);
      return {a, stratified_normals(rng, n)};
    }
    case 1: {
      auto a = stratified_normals(rng, n);
      return {a, stratified_normals(rng, n, 0.0, 4.0)};
    }
    case 2: {
      auto a = rng.exponentials(2 * n);
      return {a, rng.exponentials(2 * n)};
    }
    default: {
      auto a = stratified_normals(rng, 2 * n);
      return {a, rng.exponentials(2 * n)};
    }
  }
}

}  // namespace testing_support
