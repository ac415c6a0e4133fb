#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's statistics code: ranks are recomputed by pairwise
// counting, distributions by brute-force enumeration, special functions by
// series/closed forms/quadrature in long double.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

enum class Side { two_sided, greater, less };

inline double combine(long double lower, long double upper, Side side) {
  switch (side) {
    case Side::greater: return static_cast<double>(upper);
    case Side::less: return static_cast<double>(lower);
    case Side::two_sided: break;
  }
  return static_cast<double>(std::min<long double>(1.0L, 2.0L * std::min(lower, upper)));
}

// Phi(z) = 1/2 + phi(z) * sum_k z^(2k+1) / (1*3*5*...*(2k+1)); all terms share
// the sign of z, so there is no cancellation.
inline long double normal_cdf(long double z) {
  if (z > 9.0L) return 1.0L;
  if (z < -9.0L) return 0.0L;
  const long double phi = std::exp(-0.5L * z * z) / std::sqrt(2.0L * std::numbers::pi_v<long double>);
  long double term = z;
  long double sum = z;
  for (int k = 1; k < 2000; ++k) {
    term *= z * z / (2.0L * k + 1.0L);
    sum += term;
    if (std::fabs(term) < 1e-30L * std::fabs(sum)) break;
  }
  return 0.5L + phi * sum;
}

// Student t cdf for integer df by the classical finite trigonometric sums.
inline long double t_cdf(long double t, int df) {
  const long double theta = std::atan(std::fabs(t) / std::sqrt(static_cast<long double>(df)));
  const long double c2 = std::cos(theta) * std::cos(theta);
  const long double s = std::sin(theta);
  long double a;  // P(|T| < |t|)
  if (df % 2 == 1) {
    long double series = 0.0L;
    if (df > 1) {
      long double term = 1.0L;
      series = 1.0L;
      for (int k = 2; k <= df - 3; k += 2) {
        term *= c2 * k / (k + 1.0L);
        series += term;
      }
    }
    a = 2.0L / std::numbers::pi_v<long double> * (theta + s * std::cos(theta) * series);
  } else {
    long double term = 1.0L;
    long double series = 1.0L;
    for (int k = 1; k <= df - 3; k += 2) {
      term *= c2 * k / (k + 1.0L);
      series += term;
    }
    a = s * series;
  }
  return t >= 0 ? 0.5L + 0.5L * a : 0.5L - 0.5L * a;
}

inline long double t_density(long double x, long double df) {
  const long double logc = std::lgamma((df + 1.0L) / 2.0L) - std::lgamma(df / 2.0L) -
                           0.5L * std::log(df * std::numbers::pi_v<long double>);
  return std::exp(logc - (df + 1.0L) / 2.0L * std::log1p(x * x / df));
}

// P(T > |t|) = 1/2 - integral_0^|t| density, composite Simpson.
inline long double t_upper_tail_quadrature(long double t, long double df, int intervals = 200000) {
  const long double b = std::fabs(t);
  const long double h = b / intervals;
  long double sum = t_density(0.0L, df) + t_density(b, df);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0L : 2.0L) * t_density(i * h, df);
  return 0.5L - sum * h / 3.0L;
}

inline long double two_pass_variance(const std::vector<double>& xs) {
  long double m = 0.0L;
  for (double x : xs) m += x;
  m /= xs.size();
  long double ss = 0.0L;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / (xs.size() - 1);
}

// Rank of |d_i| among |d| by counting: 1 + #smaller + (#equal - 1) / 2.
inline std::vector<long double> count_ranks(const std::vector<double>& v) {
  std::vector<long double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    long double less = 0, equal = 0;
    for (double w : v) {
      less += w < v[i];
      equal += w == v[i];
    }
    r[i] = 1.0L + less + (equal - 1.0L) / 2.0L;
  }
  return r;
}

// Wilcoxon signed-rank p by recomputing W+ for every one of the 2^n sign
// vectors (zeros already removed by the caller).
inline double wilcoxon_enumeration(const std::vector<double>& d, Side side) {
  std::vector<double> mags;
  for (double x : d) mags.push_back(std::fabs(x));
  const auto ranks = count_ranks(mags);
  long double observed = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > 0) observed += ranks[i];
  }
  const std::uint64_t total = std::uint64_t{1} << d.size();
  std::uint64_t le = 0, ge = 0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    long double w = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (mask >> i & 1u) w += ranks[i];
    }
    le += w <= observed;
    ge += w >= observed;
  }
  return combine(static_cast<long double>(le) / total, static_cast<long double>(ge) / total, side);
}

// U_a = #(a > b) + #(a == b) / 2, by pairwise comparison.
inline long double u_statistic(const std::vector<double>& a, const std::vector<double>& b) {
  long double u = 0;
  for (double x : a) {
    for (double y : b) u += x > y ? 1.0L : (x == y ? 0.5L : 0.0L);
  }
  return u;
}

// Mann-Whitney p over every relabeling of the pooled values (N <= 24).
inline double mann_whitney_enumeration(const std::vector<double>& a, const std::vector<double>& b, Side side) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size();
  const long double observed = u_statistic(a, b);
  std::uint64_t le = 0, ge = 0, total = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != a.size()) continue;
    std::vector<double> ga, gb;
    for (std::size_t i = 0; i < n; ++i) (mask >> i & 1u ? ga : gb).push_back(pooled[i]);
    const long double u = u_statistic(ga, gb);
    le += u <= observed;
    ge += u >= observed;
    ++total;
  }
  return combine(static_cast<long double>(le) / total, static_cast<long double>(ge) / total, side);
}

// Scaled KS distance: max over pooled points x of |n_b #(a<=x) - n_a #(b<=x)|.
inline std::int64_t ks_scaled_bruteforce(const std::vector<double>& a, const std::vector<double>& b) {
  std::int64_t best = 0;
  const auto na = static_cast<std::int64_t>(a.size());
  const auto nb = static_cast<std::int64_t>(b.size());
  auto probe = [&](double x) {
    std::int64_t ca = 0, cb = 0;
    for (double v : a) ca += v <= x;
    for (double v : b) cb += v <= x;
    best = std::max(best, static_cast<std::int64_t>(std::llabs(nb * ca - na * cb)));
  };
  for (double x : a) probe(x);
  for (double x : b) probe(x);
  return best;
}

inline double ks_bruteforce(const std::vector<double>& a, const std::vector<double>& b) {
  return static_cast<double>(ks_scaled_bruteforce(a, b)) / (static_cast<double>(a.size()) * b.size());
}

inline double ks_permutation(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size();
  const auto observed = ks_scaled_bruteforce(a, b);
  std::uint64_t ge = 0, total = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != a.size()) continue;
    std::vector<double> ga, gb;
    for (std::size_t i = 0; i < n; ++i) (mask >> i & 1u ? ga : gb).push_back(pooled[i]);
    ge += ks_scaled_bruteforce(ga, gb) >= observed;
    ++total;
  }
  return static_cast<double>(ge) / static_cast<double>(total);
}

inline double welch_df(const std::vector<double>& a, const std::vector<double>& b) {
  const long double va = two_pass_variance(a) / a.size();
  const long double vb = two_pass_variance(b) / b.size();
  return static_cast<double>((va + vb) * (va + vb) /
                             (va * va / (a.size() - 1.0L) + vb * vb / (b.size() - 1.0L)));
}

}  // namespace oracle
