#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "veritas/error.hpp"
#include "veritas/stats/descriptive.hpp"
#include "veritas/stats/special.hpp"
#include "veritas/stats/tests.hpp"

namespace veritas::stats {
namespace {

template <std::size_t N>
double poly(const double (&c)[N], double x) {
  double r = c[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) r = r * x + c[i];
  return r;
}

constexpr double kC1[] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
constexpr double kC2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
constexpr double kC3[] = {0.5440, -0.39978, 0.025054, -6.714e-4};
constexpr double kC4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
constexpr double kC5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
constexpr double kC6[] = {-0.4803, -0.082676, 0.0030302};
constexpr double kG[] = {-2.273, 0.459};

// Coefficients for the lower half of the order statistics (positive values;
// the lower half enters with a minus sign).
std::vector<double> half_coefficients(std::size_t n) {
  const std::size_t half = n / 2;
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::numbers::sqrt2 / 2.0;
    return a;
  }
  const double an = static_cast<double>(n);
  std::vector<double> m(half);
  double summ2 = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
    summ2 += m[i] * m[i];
  }
  summ2 *= 2.0;
  const double ssumm2 = std::sqrt(summ2);
  const double rsn = 1.0 / std::sqrt(an);
  const double a1 = poly(kC1, rsn) - m[0] / ssumm2;

  std::size_t first_scaled;
  double fac;
  if (n > 5) {
    first_scaled = 2;
    const double a2 = -m[1] / ssumm2 + poly(kC2, rsn);
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
    a[1] = a2;
  } else {
    first_scaled = 1;
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
  }
  a[0] = a1;
  for (std::size_t i = first_scaled; i < half; ++i) a[i] = -m[i] / fac;
  return a;
}

}  // namespace

TestResult shapiro_wilk(const Sample& s) {
  const std::size_t n = s.size();
  if (n < 3 || n > 5000) {
    throw Error(ErrorKind::unsupported_size, "Shapiro-Wilk supports 3 <= n <= 5000, got " + std::to_string(n));
  }
  std::vector<double> x(s.values().begin(), s.values().end());
  std::sort(x.begin(), x.end());
  const double range = x[n - 1] - x[0];
  if (!(range > 0.0)) throw Error(ErrorKind::degenerate_sample, "Shapiro-Wilk on a constant sample");

  const auto half = half_coefficients(n);
  std::vector<double> coef(n, 0.0);
  for (std::size_t i = 0; i < half.size(); ++i) {
    coef[i] = -half[i];
    coef[n - 1 - i] = half[i];
  }

  // W as the squared correlation of the scaled data with the coefficients;
  // w1 = 1 - W is kept separately to avoid rounding for W near 1.
  double sa = 0.0;
  double sx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sa += coef[i];
    sx += x[i] / range;
  }
  sa /= static_cast<double>(n);
  sx /= static_cast<double>(n);
  double ssa = 0.0;
  double ssx = 0.0;
  double sax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double asa = coef[i] - sa;
    const double xsx = x[i] / range - sx;
    ssa += asa * asa;
    ssx += xsx * xsx;
    sax += asa * xsx;
  }
  const double ssassx = std::sqrt(ssa * ssx);
  const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
  const double w = 1.0 - w1;

  TestResult r;
  r.method = TestMethod::shapiro_wilk;
  r.statistic = w;
  r.n = {n};
  r.mode = PValueMode::asymptotic;

  const double an = static_cast<double>(n);
  if (n == 3) {
    r.mode = PValueMode::exact;
    r.p_value = std::clamp(6.0 / std::numbers::pi * (std::asin(std::sqrt(w)) - std::numbers::pi / 3.0), 0.0, 1.0);
    r.warnings.push_back("small-n: n = 3");
    return r;
  }
  double y = std::log(w1);
  double mu;
  double sigma;
  if (n <= 11) {
    const double gamma = poly(kG, an);
    if (y >= gamma) {
      r.p_value = 1e-99;
      return r;
    }
    y = -std::log(gamma - y);
    mu = poly(kC3, an);
    sigma = std::exp(poly(kC4, an));
  } else {
    const double ln = std::log(an);
    mu = poly(kC5, ln);
    sigma = std::exp(poly(kC6, ln));
  }
  r.p_value = std::clamp(normal_sf((y - mu) / sigma), 0.0, 1.0);
  return r;
}

TestResult levene(const Sample& a, const Sample& b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorKind::undefined_statistic, "Levene test needs at least 2 values per group");
  }
  struct Group {
    std::vector<double> z;
    double mean = 0.0;
    double ss = 0.0;
  };
  auto deviations = [](const Sample& s) {
    Group g;
    const double med = median(s.values());
    g.z.reserve(s.size());
    double sum = 0.0;
    for (const double x : s.values()) {
      g.z.push_back(std::abs(x - med));
      sum += g.z.back();
    }
    g.mean = sum / static_cast<double>(s.size());
    for (const double z : g.z) g.ss += (z - g.mean) * (z - g.mean);
    return g;
  };
  const Group ga = deviations(a);
  const Group gb = deviations(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double total = na + nb;

  // For two groups the between-group sum of squares reduces to
  // n_a n_b / (n_a + n_b) * (mean_a - mean_b)^2, which is symmetric in the
  // groups and exactly zero when the means agree.
  const double diff = ga.mean - gb.mean;
  const double between = na * nb / total * diff * diff;
  const double within = ga.ss + gb.ss;

  TestResult r;
  r.method = TestMethod::levene;
  r.n = {a.size(), b.size()};
  r.mode = PValueMode::analytic;
  r.df = total - 2.0;
  if (within == 0.0) {
    if (between == 0.0) {
      throw Error(ErrorKind::degenerate_sample, "Levene test: all absolute deviations are equal");
    }
    r.statistic = std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
    r.warnings.push_back("zero within-group spread of deviations");
    return r;
  }
  r.statistic = (total - 2.0) * between / within;
  r.p_value = f_sf(r.statistic, 1.0, total - 2.0);
  return r;
}

}  // namespace veritas::stats
