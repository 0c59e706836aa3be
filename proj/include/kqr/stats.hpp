#pragma once

namespace kqr {

// Inverse standard normal CDF (Wichura's PPND16 rational approximations,
// accurate to ~1e-16 over (0,1)). p in (0,1) required.
double normal_quantile(double p);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

// Chi-square CDF with k degrees of freedom: P(k/2, x/2).
double chi_squared_cdf(double x, int k);

// Inverse chi-square CDF by bisection on the monotone CDF (absolute x
// tolerance 1e-10). q in (0,1) required.
double chi_squared_quantile(double q, int k);

}  // namespace kqr
