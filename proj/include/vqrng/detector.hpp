#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vqrng {

struct DetectorParams {
  double bandwidth = 30.0;  // GHz, -3 dB point of the low-pass response
  double sigma = 0.05;      // relative r.m.s. noise in units of the normalized signal S_x
  std::uint64_t noise_seed = 2;
  std::size_t n_taps = 101;
  /// Inject sample-domain Gaussian noise after filtering (comparator path).
  bool sample_noise = false;

  void validate() const;
  friend bool operator==(const DetectorParams&, const DetectorParams&) = default;
};

struct FilterKernel {
  std::vector<double> taps;
  double dt = 0.0;  // ns

  std::size_t center() const noexcept { return taps.size() / 2; }
};

/// Hamming-windowed sinc low-pass with unit DC gain. The sinc cutoff is
/// placed so that the kernel's magnitude response equals 1/sqrt(2) at
/// `bandwidth_ghz`. Throws ErrorCode::filter_design when the bandwidth is not
/// below Nyquist, `n_taps` is even or < 11, or the kernel is too short to reach
/// the requested cutoff.
FilterKernel design_lowpass(double bandwidth_ghz, double dt_ns, std::size_t n_taps);

/// |H(f)| of the kernel at frequency `f_ghz`.
double magnitude_response(const FilterKernel& kernel, double f_ghz);

/// Centered convolution; samples beyond either end replicate the edge value.
std::vector<double> apply_filter(std::span<const double> samples, double dt_ns, const FilterKernel& kernel);

/// Adds i.i.d. N(0, sigma_abs^2) samples. Sample i draws from the counter
/// block keyed by (seed, first_index + i), so a long record can be processed
/// in chunks with identical results.
std::vector<double> add_noise(std::span<const double> samples, double sigma_abs, std::uint64_t seed,
                              std::uint64_t first_index = 0);

/// Low-pass then noise; the order is fixed.
std::vector<double> detect(std::span<const double> samples, double dt_ns, const FilterKernel& kernel,
                           double sigma_abs, std::uint64_t seed, std::uint64_t first_index = 0);

/// Per-sample noise level that spreads S_x by `sigma` for a frame of mean
/// total energy `mean_frame_energy` integrated over `window_samples` samples.
double calibrate_sigma_abs(double sigma, double mean_frame_energy, double dt_ns, std::size_t window_samples);

}  // namespace vqrng
