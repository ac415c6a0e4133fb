#pragma once

#include <vector>

#include "veritas/stats/exact_kernels.hpp"
#include "veritas/stats/types.hpp"

namespace veritas::stats {

// Shapiro-Wilk W with Royston's (1995, AS R94) coefficient approximation and
// p-value transformation; 3 <= n <= 5000.
//
// Coefficients, with m_i = Phi^-1((i - 3/8) / (n + 1/4)), u = 1/sqrt(n):
//   a_n     = -m_n / ||m|| + c1(u),   c1 = [0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056]
//   a_{n-1} = -m_{n-1}/||m|| + c2(u), c2 = [0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633]
// (second coefficient only for n > 5); the rest are m_i rescaled so sum a^2 = 1.
// n = 3 uses a = 1/sqrt(2) and the exact p = (6/pi) (asin(sqrt(W)) - pi/3).
// p-value: with w = log(1 - W),
//   4 <= n <= 11: g = -2.273 + 0.459 n; if w >= g then p = 1e-99
//                 y = -log(g - w), mu = 0.5440 - 0.39978 n + 0.025054 n^2 - 6.714e-4 n^3
//                 sigma = exp(1.3822 - 0.77857 n + 0.062767 n^2 - 0.0020322 n^3)
//   n >= 12:      y = w, with l = log(n):
//                 mu = -1.5861 - 0.31082 l - 0.083751 l^2 + 0.0038915 l^3
//                 sigma = exp(-0.4803 - 0.082676 l + 0.0030302 l^2)
//   p = 1 - Phi((y - mu) / sigma)
TestResult shapiro_wilk(const Sample& s);

// Brown-Forsythe variant of Levene: one-way F on |x - median| of each group.
TestResult levene(const Sample& a, const Sample& b);

// t = mean(d) / (sd(d) / sqrt(n)), df = n - 1, d = a - b.
TestResult paired_t(const PairedSamples& ps, Direction direction = Direction::two_sided);

// Welch statistic with Welch-Satterthwaite degrees of freedom.
TestResult welch_t(const Sample& a, const Sample& b, Direction direction = Direction::two_sided);

// Statistic is W+ (sum of ranks of positive differences a - b). Zero
// differences are dropped. Exact p by enumerating all 2^n sign vectors
// when n <= 25 (auto); otherwise the normal approximation with tie and
// continuity corrections. "greater" means a tends to exceed b.
TestResult wilcoxon_signed_rank(const PairedSamples& ps, Direction direction = Direction::two_sided,
                                ExactMode mode = ExactMode::automatic,
                                kernels::Exec exec = kernels::Exec::parallel);

// Statistic is U_a = R_a - n_a (n_a + 1) / 2 (pairs with a > b, ties half).
// Exact p by enumerating group labelings when n_a * n_b <= 64 and no ties
// (auto); else normal approximation with tie and continuity corrections.
// Carries the rank-biserial effect 2 U_a / (n_a n_b) - 1.
TestResult mann_whitney_u(const Sample& a, const Sample& b, Direction direction = Direction::two_sided,
                          ExactMode mode = ExactMode::automatic,
                          kernels::Exec exec = kernels::Exec::parallel);

// Two-sided always. D by merge scan; exact permutation p when
// C(n_a + n_b, n_a) <= 20000 (auto); else Q(sqrt(n_a n_b / (n_a + n_b)) D).
TestResult ks_two_sample(const Sample& a, const Sample& b, ExactMode mode = ExactMode::automatic,
                         kernels::Exec exec = kernels::Exec::parallel);

// sup_x |F_a(x) - F_b(x)|
double ks_statistic(const Sample& a, const Sample& b);

// Paired: mean(d) / sd(d). Unpaired: (mean_a - mean_b) / pooled sd.
EffectSize cohens_d(const PairedSamples& ps);
EffectSize cohens_d(const Sample& a, const Sample& b);

// Holm step-down adjusted p-values, same order as the input.
std::vector<double> holm_adjust(const std::vector<double>& p);

}  // namespace veritas::stats
