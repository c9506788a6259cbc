#include "vqrng/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "vqrng/error.hpp"

namespace vqrng::special {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 100000;

// exp(-x + a ln x - lgamma(a)), the common prefactor.
double prefactor(double a, double x) { return std::exp(-x + a * std::log(x) - std::lgamma(a)); }

// P(a, x) by the power series, for x < a + 1.
double lower_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * prefactor(a, x);
}

// Q(a, x) by the Legendre continued fraction (modified Lentz), for x >= a + 1.
double upper_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return prefactor(a, x) * h;
}

void check(double a, double x) {
  require(a > 0 && std::isfinite(a), "incomplete gamma needs a > 0, got " + std::to_string(a));
  require(x >= 0 && !std::isnan(x), "incomplete gamma needs x >= 0, got " + std::to_string(x));
}

}  // namespace

double igam(double a, double x) {
  check(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return x < a + 1.0 ? lower_series(a, x) : 1.0 - upper_fraction(a, x);
}

double igamc(double a, double x) {
  check(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return x < a + 1.0 ? 1.0 - lower_series(a, x) : upper_fraction(a, x);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace vqrng::special
