#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vqrng/detector.hpp"
#include "vqrng/digitizer.hpp"
#include "vqrng/laser.hpp"

namespace vqrng {

/// Long runs are cut into fixed segments of frames that are integrated
/// independently. Each segment starts from the resting state `warmup_frames`
/// frames early, replaying the same noise as the run it joins, so the result
/// depends on the segment layout but never on the number of threads.
struct EngineOptions {
  std::size_t segment_frames = 1000;
  std::size_t warmup_frames = 16;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
  friend bool operator==(const EngineOptions&, const EngineOptions&) = default;
};

struct FrameSimulation {
  std::vector<FrameEnergy> energies;
  /// Low-pass filtered px at each frame's latch sample (comparator input
  /// before detector noise) and the absolute index of that sample.
  std::vector<double> latch;
  std::vector<std::int64_t> latch_index;
};

/// First sample of `frame` on the absolute grid.
std::int64_t frame_first_sample(const PumpWaveform& waveform, double dt, std::int64_t frame);

FrameSimulation simulate_frames(const VcselParams& laser, const PumpWaveform& pump, const SimGrid& grid,
                                const FrameSpec& frames, const FilterKernel& kernel, const EngineOptions& opts);

/// Adds detector noise to latched comparator samples. Sample-domain noise is
/// keyed by absolute sample index, so this equals `add_noise` applied to the
/// whole filtered trace and then latched.
std::vector<double> noisy_latch(const FrameSimulation& sim, double sigma_abs, std::uint64_t noise_seed);

/// Isodata threshold: the midpoint between the means of the two classes it
/// separates, iterated to a fixed point.
double bimodal_midpoint(const std::vector<double>& values);

}  // namespace vqrng
