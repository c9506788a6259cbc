#include "vqrng/detector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "vqrng/error.hpp"
#include "vqrng/rng.hpp"

namespace vqrng {

void DetectorParams::validate() const {
  require(std::isfinite(bandwidth) && bandwidth > 0, "detector bandwidth must be > 0");
  require(std::isfinite(sigma) && sigma >= 0, "detector sigma must be >= 0");
}

namespace {

std::vector<double> windowed_sinc(double cutoff_ghz, double dt_ns, std::size_t n_taps) {
  const double fc = cutoff_ghz * dt_ns;  // cycles per sample
  const double mid = static_cast<double>(n_taps - 1) / 2.0;
  std::vector<double> taps(n_taps);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_taps; ++i) {
    const double x = static_cast<double>(i) - mid;
    const double sinc = x == 0.0 ? 2.0 * fc : std::sin(2.0 * std::numbers::pi * fc * x) / (std::numbers::pi * x);
    const double window = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                                 static_cast<double>(n_taps - 1));
    taps[i] = sinc * window;
    sum += taps[i];
  }
  for (auto& t : taps) t /= sum;
  // Pairwise averaging makes the symmetry exact in floating point.
  for (std::size_t i = 0; i < n_taps / 2; ++i) {
    const double avg = 0.5 * (taps[i] + taps[n_taps - 1 - i]);
    taps[i] = taps[n_taps - 1 - i] = avg;
  }
  return taps;
}

}  // namespace

double magnitude_response(const FilterKernel& kernel, double f_ghz) {
  // Symmetric taps: H(f) = e^{-i w c} [h_c + 2 sum_k h_{c+k} cos(w k)].
  const double w = 2.0 * std::numbers::pi * f_ghz * kernel.dt;
  const std::size_t c = kernel.center();
  double acc = kernel.taps[c];
  for (std::size_t k = 1; k <= c; ++k) acc += 2.0 * kernel.taps[c + k] * std::cos(w * static_cast<double>(k));
  return std::abs(acc);
}

FilterKernel design_lowpass(double bandwidth_ghz, double dt_ns, std::size_t n_taps) {
  if (!(dt_ns > 0)) fail(ErrorCode::filter_design, "filter sample spacing must be > 0");
  const double nyquist = 1.0 / (2.0 * dt_ns);
  if (!(bandwidth_ghz > 0) || bandwidth_ghz >= nyquist)
    fail(ErrorCode::filter_design, "bandwidth " + std::to_string(bandwidth_ghz) + " GHz must lie in (0, Nyquist = " +
                                       std::to_string(nyquist) + " GHz)");
  if (n_taps % 2 == 0 || n_taps < 11)
    fail(ErrorCode::filter_design, "tap count must be odd and >= 11, got " + std::to_string(n_taps));

  constexpr double half_power = 0.70710678118654752440;
  FilterKernel kernel{{}, dt_ns};
  auto gain_at_band_edge = [&](double cutoff) {
    kernel.taps = windowed_sinc(cutoff, dt_ns, n_taps);
    return magnitude_response(kernel, bandwidth_ghz);
  };
  // |H(bandwidth)| grows with the sinc cutoff; bisect for the -3 dB point.
  double lo = 1e-3 * bandwidth_ghz;
  double hi = nyquist;
  if (gain_at_band_edge(hi) <= half_power) return kernel;
  if (gain_at_band_edge(lo) > half_power)
    fail(ErrorCode::filter_design, std::to_string(n_taps) + " taps cannot place the -3 dB point at " +
                                       std::to_string(bandwidth_ghz) + " GHz");
  for (int iter = 0; iter < 100 && hi - lo > 1e-12 * nyquist; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (gain_at_band_edge(mid) < half_power ? lo : hi) = mid;
  }
  kernel.taps = windowed_sinc(0.5 * (lo + hi), dt_ns, n_taps);
  return kernel;
}

std::vector<double> apply_filter(std::span<const double> samples, double dt_ns, const FilterKernel& kernel) {
  if (std::abs(dt_ns - kernel.dt) > 1e-12 * std::max(std::abs(dt_ns), std::abs(kernel.dt)))
    fail(ErrorCode::invalid_argument, "trace dt " + std::to_string(dt_ns) + " ns does not match kernel dt " +
                                          std::to_string(kernel.dt) + " ns");
  const std::size_t n = samples.size();
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  const auto c = static_cast<std::ptrdiff_t>(kernel.center());
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
  const std::size_t n_taps = kernel.taps.size();
  for (std::ptrdiff_t i = 0; i <= last; ++i) {
    double acc = 0.0;
    if (i - c >= 0 && i + c <= last) {
      const double* x = samples.data() + (i - c);
      for (std::size_t j = 0; j < n_taps; ++j) acc += kernel.taps[j] * x[n_taps - 1 - j];
    } else {
      for (std::size_t j = 0; j < n_taps; ++j) {
        const std::ptrdiff_t src = std::clamp<std::ptrdiff_t>(i + c - static_cast<std::ptrdiff_t>(j), 0, last);
        acc += kernel.taps[j] * samples[static_cast<std::size_t>(src)];
      }
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

std::vector<double> add_noise(std::span<const double> samples, double sigma_abs, std::uint64_t seed,
                              std::uint64_t first_index) {
  require(std::isfinite(sigma_abs) && sigma_abs >= 0, "noise level must be >= 0");
  std::vector<double> out(samples.begin(), samples.end());
  if (sigma_abs == 0.0) return out;
  const rng::Philox4x32 gen(seed);
  // Counter block b holds the normals for absolute samples 4b .. 4b+3.
  std::uint64_t block = ~std::uint64_t{0};
  std::array<double, 4> lanes{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint64_t index = first_index + i;
    if (index / 4 != block) {
      block = index / 4;
      lanes = gen.normals(1, block);
    }
    out[i] += sigma_abs * lanes[index % 4];
  }
  return out;
}

std::vector<double> detect(std::span<const double> samples, double dt_ns, const FilterKernel& kernel,
                           double sigma_abs, std::uint64_t seed, std::uint64_t first_index) {
  const auto filtered = apply_filter(samples, dt_ns, kernel);
  return add_noise(filtered, sigma_abs, seed, first_index);
}

double calibrate_sigma_abs(double sigma, double mean_frame_energy, double dt_ns, std::size_t window_samples) {
  require(sigma >= 0 && mean_frame_energy >= 0 && dt_ns > 0 && window_samples > 0,
          "noise calibration needs sigma >= 0, energy >= 0, dt > 0 and a nonempty window");
  return sigma * mean_frame_energy / (dt_ns * std::sqrt(static_cast<double>(window_samples)));
}

}  // namespace vqrng
