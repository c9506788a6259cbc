#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vqrng/config.hpp"
#include "vqrng/entropy.hpp"
#include "vqrng/extractors.hpp"
#include "vqrng/frames.hpp"
#include "vqrng/stat_suite.hpp"

namespace vqrng {

/// Execution knobs that never change results.
struct RunOptions {
  unsigned threads = 0;
  std::size_t trace_frames = 0;  // also write trace.csv for the first frames
};

struct DigitizeResult {
  DigitizedFrames frames;
  double v_th = 0.0;       // comparator mode only
  double sigma_abs = 0.0;  // comparator sample noise, 0 when disabled
};

// Stages. Each writes its artifacts into config.output_dir and wraps failures
// in a StageError named after the stage.
FrameSimulation stage_simulate(const PipelineConfig& config, const RunOptions& run = {});
DigitizeResult stage_digitize(const PipelineConfig& config, const FrameSimulation& sim);
EntropyReport stage_entropy(const PipelineConfig& config, const std::vector<FrameRecord>& records);
ExtractionResult stage_extract(const PipelineConfig& config, const BitStream& raw, const EntropyReport& report);
nist::SuiteReport stage_test(const PipelineConfig& config, const BitStream& bits);

// The same stages fed from the files of the previous stage in output_dir.
DigitizeResult digitize_from_files(const PipelineConfig& config);
EntropyReport entropy_from_files(const PipelineConfig& config);
ExtractionResult extract_from_files(const PipelineConfig& config);
nist::SuiteReport test_from_files(const PipelineConfig& config);

struct PipelineResult {
  std::uint64_t frames = 0;
  std::uint64_t degenerate = 0;
  std::uint64_t raw_bits = 0;
  EntropyReport entropy;
  ExtractionResult extraction;
  nist::SuiteReport suite;
  std::map<std::string, std::string> checksums;  // artifact name -> sha256
  std::string config_sha256;
};

/// simulate -> digitize -> entropy -> extract -> test, then manifest.json
/// with the config hash (output_dir excluded) and every artifact's SHA-256.
PipelineResult run_pipeline(const PipelineConfig& config, const RunOptions& run = {});

std::string config_hash(const PipelineConfig& config);

struct RateDataset {
  double rep_rate = 0.0;
  DigitizedFrames frames;
  BitStream bits;
  std::vector<double> sx;
  Histogram histogram;
  double central_mass = 0.0;
};

/// Energy-mode S_x data, one simulation per rate.
std::vector<RateDataset> simulate_rates(const PipelineConfig& config, const std::vector<double>& rates,
                                        const RunOptions& run = {});

/// Writes fig2a_<rate>GHz.csv per rate and fig2a_summary.csv
/// (`rep_rate_ghz,frames,degenerate,central_mass,h_min`).
std::vector<RateDataset> sweep_sx_histograms(const PipelineConfig& config, const std::vector<double>& rates,
                                             const RunOptions& run = {});
void write_fig2a(const PipelineConfig& config, const std::vector<RateDataset>& data);

struct ReductionCell {
  double sigma = 0.0;
  double rep_rate = 0.0;
  double h_min = 0.0;
  double p_window = 0.0;
  std::optional<double> gamma_tilde;
  std::string reason;  // why gamma_tilde is absent
};

/// cells[r][s] for rate r and sigma s; sigma enters only through the window.
struct ReductionTable {
  std::vector<double> sigmas;
  std::vector<double> rep_rates;
  std::vector<std::vector<ReductionCell>> cells;
};

ReductionTable reduction_table(const std::vector<RateDataset>& data, const std::vector<double>& sigmas, double c);

/// Writes fig2b.csv (`sigma,gamma_<rate>GHz,...`, empty cell when absent) and
/// fig2b_long.csv (`rep_rate_ghz,sigma,h_min,p_window,gamma_tilde,status`).
ReductionTable sweep_reduction_factor(const PipelineConfig& config, const std::vector<double>& sigmas,
                                      const std::vector<double>& rates, const RunOptions& run = {});
void write_fig2b(const PipelineConfig& config, const ReductionTable& table);

}  // namespace vqrng
