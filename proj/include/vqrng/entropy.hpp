#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vqrng/bitstream.hpp"

namespace vqrng {

struct Histogram {
  std::vector<double> bin_edges;  // n_bins + 1 ascending edges spanning [0, 1]
  std::vector<double> densities;  // per unit S_x

  std::size_t bins() const noexcept { return densities.size(); }
  double bin_width(std::size_t i) const { return bin_edges[i + 1] - bin_edges[i]; }
  /// Probability mass of the bins lying entirely inside [lo, hi].
  double mass_between(double lo, double hi) const;
};

/// Uniform bins over [0, 1]; the value 1 falls in the last bin.
Histogram histogram(std::span<const double> sx, std::size_t n_bins);

/// -log2 max(p0, p1) of the empirical bit frequencies.
double min_entropy(const BitStream& bits);

/// Fraction of values inside the closed window 0.5 +- c sigma / 2.
double window_probability(std::span<const double> sx, double sigma, double c);

/// Width of the window after clipping to [0, 1].
double window_width(double sigma, double c);

/// 1 / (h_min (1 - p_window)); ErrorCode::no_extractable_entropy when
/// h_min = 0 or p_window = 1.
double reduction_factor(double h_min, double p_window);

struct EntropyReport {
  double h_min = 0.0;
  double p_window = 0.0;
  double gamma_tilde = 0.0;
  double sigma = 0.0;
  double window_c = 6.0;
  double window_width = 0.0;
  std::uint64_t n_bits = 0;
  std::uint64_t n_ones = 0;

  friend bool operator==(const EntropyReport&, const EntropyReport&) = default;
};

EntropyReport assess_entropy(std::span<const double> sx, const BitStream& raw_bits, double sigma, double c);

}  // namespace vqrng
