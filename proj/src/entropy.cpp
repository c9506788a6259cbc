#include "vqrng/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vqrng/error.hpp"

namespace vqrng {

double Histogram::mass_between(double lo, double hi) const {
  double mass = 0.0;
  for (std::size_t i = 0; i < bins(); ++i)
    if (bin_edges[i] >= lo - 1e-12 && bin_edges[i + 1] <= hi + 1e-12) mass += densities[i] * bin_width(i);
  return mass;
}

Histogram histogram(std::span<const double> sx, std::size_t n_bins) {
  require(n_bins >= 2, "histogram needs at least 2 bins");
  if (sx.empty()) fail(ErrorCode::invalid_argument, "histogram of an empty sample");
  Histogram h;
  h.bin_edges.resize(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i) h.bin_edges[i] = static_cast<double>(i) / static_cast<double>(n_bins);
  std::vector<std::uint64_t> counts(n_bins, 0);
  for (const double v : sx) {
    if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::invalid_argument, "S_x value " + std::to_string(v) + " outside [0, 1]");
    const auto bin = std::min(static_cast<std::size_t>(v * static_cast<double>(n_bins)), n_bins - 1);
    ++counts[bin];
  }
  h.densities.resize(n_bins);
  const double total = static_cast<double>(sx.size());
  for (std::size_t i = 0; i < n_bins; ++i) h.densities[i] = static_cast<double>(counts[i]) / (total * h.bin_width(i));
  return h;
}

double min_entropy(const BitStream& bits) {
  require(!bits.empty(), "min-entropy of an empty bit sequence");
  const auto ones = static_cast<double>(bits.count_ones());
  const auto n = static_cast<double>(bits.size());
  const double p_max = std::max(ones, n - ones) / n;
  return p_max == 1.0 ? 0.0 : -std::log2(p_max);
}

double window_width(double sigma, double c) {
  require(std::isfinite(sigma) && sigma >= 0, "sigma must be >= 0");
  require(std::isfinite(c) && c > 0, "window constant must be > 0");
  return std::min(c * sigma, 1.0);
}

double window_probability(std::span<const double> sx, double sigma, double c) {
  const double half = 0.5 * window_width(sigma, c);
  if (sx.empty()) return 0.0;
  const double lo = 0.5 - half;
  const double hi = 0.5 + half;
  std::size_t inside = 0;
  for (const double v : sx) inside += (v >= lo && v <= hi) ? 1 : 0;
  return static_cast<double>(inside) / static_cast<double>(sx.size());
}

double reduction_factor(double h_min, double p_window) {
  require(h_min >= 0 && h_min <= 1, "min-entropy must lie in [0, 1]");
  require(p_window >= 0 && p_window <= 1, "window probability must lie in [0, 1]");
  if (h_min == 0.0) fail(ErrorCode::no_extractable_entropy, "min-entropy is zero");
  if (p_window == 1.0) fail(ErrorCode::no_extractable_entropy, "every frame lies inside the untrusted window");
  return 1.0 / (h_min * (1.0 - p_window));
}

EntropyReport assess_entropy(std::span<const double> sx, const BitStream& raw_bits, double sigma, double c) {
  if (raw_bits.empty()) fail(ErrorCode::no_extractable_entropy, "no raw bits (all frames degenerate)");
  EntropyReport r;
  r.sigma = sigma;
  r.window_c = c;
  r.window_width = window_width(sigma, c);
  r.n_bits = raw_bits.size();
  r.n_ones = raw_bits.count_ones();
  r.h_min = min_entropy(raw_bits);
  r.p_window = window_probability(sx, sigma, c);
  r.gamma_tilde = reduction_factor(r.h_min, r.p_window);
  return r;
}

}  // namespace vqrng
