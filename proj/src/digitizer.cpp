#include "vqrng/digitizer.hpp"

#include <cmath>
#include <string>

#include "vqrng/error.hpp"

namespace vqrng {

FrameSpec FrameSpec::for_waveform(const PumpWaveform& waveform) {
  const double period = waveform.period();
  return {period, 0.5 * waveform.duty * period, 0.0, period};
}

void FrameSpec::validate() const {
  require(std::isfinite(period) && period > 0, "frame period must be > 0");
  require(latch_offset >= 0 && latch_offset < period, "latch offset must lie in [0, period)");
  require(window_start >= 0 && window_start < window_end && window_end <= period * (1 + 1e-12),
          "energy window must satisfy 0 <= start < end <= period");
}

namespace {

std::int64_t first_sample_at_or_after(double t, double dt) {
  return static_cast<std::int64_t>(std::ceil(t / dt - 1e-9));
}

}  // namespace

std::pair<std::int64_t, std::int64_t> window_samples(const FrameSpec& spec, double dt, std::int64_t frame) {
  const double t0 = static_cast<double>(frame) * spec.period;
  return {first_sample_at_or_after(t0 + spec.window_start, dt), first_sample_at_or_after(t0 + spec.window_end, dt)};
}

std::int64_t latch_sample(const FrameSpec& spec, double dt, std::int64_t frame) {
  return std::llround((static_cast<double>(frame) * spec.period + spec.latch_offset) / dt);
}

std::size_t whole_frames(const FrameSpec& spec, double dt, std::size_t n_samples) {
  const double span = static_cast<double>(n_samples) * dt;
  return static_cast<std::size_t>(std::floor(span / spec.period + 1e-9));
}

BitStream comparator_bits(std::span<const double> samples, double dt, const FrameSpec& spec, double v_th) {
  spec.validate();
  require(std::isfinite(v_th), "comparator threshold must be finite");
  const std::size_t frames = whole_frames(spec, dt, samples.size());
  if (frames == 0)
    fail(ErrorCode::invalid_argument, "trace of " + std::to_string(samples.size()) + " samples is shorter than one frame");
  BitStream bits(frames);
  const auto last = static_cast<std::int64_t>(samples.size()) - 1;
  for (std::size_t f = 0; f < frames; ++f) {
    const std::int64_t k = std::min(latch_sample(spec, dt, static_cast<std::int64_t>(f)), last);
    bits.set(f, samples[static_cast<std::size_t>(k)] >= v_th);
  }
  return bits;
}

std::vector<FrameEnergy> frame_energies(std::span<const double> px, std::span<const double> py, double dt,
                                        const FrameSpec& spec) {
  spec.validate();
  if (px.size() != py.size())
    fail(ErrorCode::length_mismatch, "px has " + std::to_string(px.size()) + " samples, py has " +
                                         std::to_string(py.size()));
  const std::size_t frames = whole_frames(spec, dt, px.size());
  std::vector<FrameEnergy> out(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    auto [first, last] = window_samples(spec, dt, static_cast<std::int64_t>(f));
    last = std::min<std::int64_t>(last, static_cast<std::int64_t>(px.size()));
    if (last <= first)
      fail(ErrorCode::invalid_argument, "energy window of frame " + std::to_string(f) + " holds no samples");
    double ex = 0.0, ey = 0.0;
    for (auto k = static_cast<std::size_t>(first); k < static_cast<std::size_t>(last); ++k) {
      ex += px[k];
      ey += py[k];
    }
    out[f] = {ex * dt, ey * dt};
  }
  return out;
}

double normalized_sx(double ex, double ey) {
  require(ex >= 0 && ey >= 0, "frame energies must be >= 0");
  const double total = ex + ey;
  if (total == 0.0) fail(ErrorCode::degenerate_frame, "zero-energy frame has no polarization information");
  // Computing the smaller share directly makes sx(a, b) + sx(b, a) == 1 exact.
  return ex <= ey ? ex / total : 1.0 - ey / total;
}

BitStream energy_bits(std::span<const double> sx, double threshold) {
  BitStream bits(sx.size());
  for (std::size_t i = 0; i < sx.size(); ++i) bits.set(i, sx[i] >= threshold);
  return bits;
}

std::vector<double> DigitizedFrames::sx() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.sx);
  return out;
}

BitStream DigitizedFrames::bits() const {
  BitStream out(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) out.set(i, records[i].bit);
  return out;
}

DigitizedFrames digitize_energies(std::span<const FrameEnergy> energies, double threshold, std::uint64_t first_frame) {
  DigitizedFrames out;
  out.records.reserve(energies.size());
  for (std::size_t i = 0; i < energies.size(); ++i) {
    const auto& e = energies[i];
    if (e.ex + e.ey == 0.0) {
      ++out.degenerate;
      continue;
    }
    const double sx = normalized_sx(e.ex, e.ey);
    out.records.push_back({first_frame + i, e.ex, e.ey, sx, sx >= threshold});
  }
  return out;
}

}  // namespace vqrng
