#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vqrng/detector.hpp"
#include "vqrng/digitizer.hpp"
#include "vqrng/frames.hpp"
#include "vqrng/laser.hpp"
#include "vqrng/stat_suite.hpp"

namespace vqrng {

enum class DigitizerMode { energy, comparator };

struct ComparatorConfig {
  bool auto_threshold = true;  // isodata midpoint of the latched samples
  ComparatorSpec spec;         // used when auto_threshold is false

  friend bool operator==(const ComparatorConfig&, const ComparatorConfig&) = default;
};

struct SweepConfig {
  std::vector<double> rep_rates{2.5, 5.0, 7.0};
  std::vector<double> sigmas{0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1};
  std::size_t histogram_bins = 50;
  double central_lo = 0.25;
  double central_hi = 0.75;

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct PipelineConfig {
  VcselParams laser;
  PumpWaveform pump;
  SimGrid grid;
  EngineOptions engine;
  DetectorParams detector;
  FrameSpec frames = FrameSpec::for_waveform(PumpWaveform{});
  ComparatorConfig comparator;
  DigitizerMode mode = DigitizerMode::energy;
  double energy_threshold = 0.5;
  double window_c = 6.0;
  std::size_t block_n = 4096;
  unsigned k = 8;
  bool fir = true;
  nist::SuiteOptions tests;
  std::size_t sequence_bits = 0;  // 0: test the extracted output as one sequence
  SweepConfig sweep;
  std::string output_dir = "out";

  /// Nested invariants plus frames.period = 1 / pump.rep_rate.
  void validate() const;
  /// Copy at another repetition rate with the frame layout scaled along.
  PipelineConfig at_rate(double rep_rate) const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Pretty-printed JSON with every field spelled out.
std::string serialize_config(const PipelineConfig& config);
/// Missing keys keep their defaults; unknown keys and bad types are
/// ErrorCode::parse. A missing "frames" block follows the pump period.
PipelineConfig parse_config(const std::string& text);

PipelineConfig load_config(const std::string& path);
void save_config(const PipelineConfig& config, const std::string& path);

/// Dotted-path override, e.g. set_config_value(cfg, "laser.gamma_a", "0.3").
/// The value is JSON text.
void set_config_value(PipelineConfig& config, const std::string& dotted_key, const std::string& json_value);

}  // namespace vqrng
