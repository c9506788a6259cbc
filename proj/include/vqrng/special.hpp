#pragma once

namespace vqrng::special {

/// Regularized lower incomplete gamma P(a, x).
double igam(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double igamc(double a, double x);
/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace vqrng::special
