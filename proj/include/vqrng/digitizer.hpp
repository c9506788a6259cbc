#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "vqrng/bitstream.hpp"
#include "vqrng/laser.hpp"

namespace vqrng {

/// Times are relative to the start of each frame, in ns.
struct FrameSpec {
  double period = 0.4;
  double latch_offset = 0.1;
  double window_start = 0.0;
  double window_end = 0.4;

  /// Full-frame energy window; latch at the middle of the pump-on interval.
  static FrameSpec for_waveform(const PumpWaveform& waveform);
  void validate() const;
  friend bool operator==(const FrameSpec&, const FrameSpec&) = default;
};

struct ComparatorSpec {
  double v_th = 0.0;
  friend bool operator==(const ComparatorSpec&, const ComparatorSpec&) = default;
};

struct FrameEnergy {
  double ex = 0.0;
  double ey = 0.0;
};

struct FrameRecord {
  std::uint64_t frame = 0;
  double ex = 0.0;
  double ey = 0.0;
  double sx = 0.0;
  bool bit = false;
};

/// Half-open sample range [first, last) of the energy window of `frame`,
/// with sample k at time k dt. A sample sitting on a boundary (to 1e-9
/// relative) belongs to the later interval.
std::pair<std::int64_t, std::int64_t> window_samples(const FrameSpec& spec, double dt, std::int64_t frame);

/// Sample index nearest to the latch instant of `frame`.
std::int64_t latch_sample(const FrameSpec& spec, double dt, std::int64_t frame);

/// Number of whole frames covered by `n_samples` samples starting at t = 0.
std::size_t whole_frames(const FrameSpec& spec, double dt, std::size_t n_samples);

/// One bit per whole frame: 1 iff the latched sample is >= v_th.
BitStream comparator_bits(std::span<const double> samples, double dt, const FrameSpec& spec, double v_th);

/// Rectangle-rule energy of px and py over each frame's window.
std::vector<FrameEnergy> frame_energies(std::span<const double> px, std::span<const double> py, double dt,
                                        const FrameSpec& spec);

/// ex / (ex + ey). Throws ErrorCode::degenerate_frame for a zero-energy frame.
double normalized_sx(double ex, double ey);

BitStream energy_bits(std::span<const double> sx, double threshold = 0.5);

struct DigitizedFrames {
  std::vector<FrameRecord> records;  // non-degenerate frames only, in frame order
  std::uint64_t degenerate = 0;

  std::vector<double> sx() const;
  BitStream bits() const;
};

/// Energy-mode digitization of consecutive frames; `first_frame` labels the
/// first entry. Zero-energy frames are counted and skipped.
DigitizedFrames digitize_energies(std::span<const FrameEnergy> energies, double threshold = 0.5,
                                  std::uint64_t first_frame = 0);

}  // namespace vqrng
