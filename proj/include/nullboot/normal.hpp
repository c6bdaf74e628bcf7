#pragma once

namespace nullboot {

// Standard normal cdf.
double norm_cdf(double x);
// Standard normal quantile; returns -inf / +inf at 0 / 1.
double norm_quantile(double p);
// P(X <= h, Y <= k) for a standard bivariate normal with correlation rho; accepts infinite
// limits. Absolute error below 1e-14.
double bivariate_normal_cdf(double h, double k, double rho);

}  // namespace nullboot
