#pragma once

// Special functions behind the tests. Accuracy targets (absolute):
//   normal_cdf            1e-12   (erfc based)
//   t_cdf / t_sf          1e-10   (regularized incomplete beta, Lentz continued fraction)
//   kolmogorov_sf         1e-12   (alternating series, at most 100 terms;
//                                  returns 1 for x < 0.2 where 1 - Q(x) < 1e-12)
namespace veritas::stats {

double normal_cdf(double z);
double normal_sf(double z);
// Wichura AS241 (PPND16), relative accuracy about 1e-16. p in (0, 1).
double normal_quantile(double p);

double log_gamma(double x);

// Regularized incomplete beta I_x(a, b). `y` must equal 1 - x; passing it
// separately avoids cancellation when x is close to 1.
double incomplete_beta(double a, double b, double x, double y);
inline double incomplete_beta(double a, double b, double x) { return incomplete_beta(a, b, x, 1.0 - x); }

// Student t with df > 0 degrees of freedom (non-integer allowed).
double t_cdf(double t, double df);
double t_sf(double t, double df);
double t_quantile(double p, double df);

// Upper tail of the F(d1, d2) distribution.
double f_sf(double f, double d1, double d2);

// Q(x) = 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2)
double kolmogorov_sf(double x);

}  // namespace veritas::stats
