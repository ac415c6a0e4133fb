#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "veritas/core/seed.hpp"

// Portable generators for test data (Box-Muller and inversion on SplitMix64),
// so frozen expectations do not depend on the standard library's
// distribution implementations.
namespace testing_support {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return gen_.uniform(); }

  double normal(double mean = 0.0, double sd = 1.0) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + sd * spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = gen_.uniform();
    const double u2 = gen_.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return mean + sd * r * std::cos(2.0 * std::numbers::pi * u2);
  }

  double exponential(double rate = 1.0) {
    double u = 0.0;
    while (u <= 0.0) u = gen_.uniform();
    return -std::log(u) / rate;
  }

  std::vector<double> normals(std::size_t n, double mean = 0.0, double sd = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = normal(mean, sd);
    return v;
  }

  std::vector<double> exponentials(std::size_t n, double rate = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = exponential(rate);
    return v;
  }

  // Distinct values with probability 1; rounding to a grid would introduce ties.
  std::vector<double> uniforms(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform();
    return v;
  }

  std::uint64_t below(std::uint64_t bound) { return gen_.below(bound); }

 private:
  veritas::SplitMix64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace testing_support
