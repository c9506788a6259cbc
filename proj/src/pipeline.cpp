#include "vqrng/pipeline.hpp"

#include <algorithm>
#include <cstdio>

#include "json.hpp"
#include "vqrng/error.hpp"
#include "vqrng/io.hpp"

namespace vqrng {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

template <typename F>
auto in_stage(const char* stage, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  } catch (const std::filesystem::filesystem_error& e) {
    throw StageError(stage, Error(ErrorCode::io, e.what()));
  }
}

fs::path out_dir(const PipelineConfig& config) {
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  return dir;
}

FilterKernel kernel_for(const PipelineConfig& config) {
  return design_lowpass(config.detector.bandwidth, config.grid.dt, config.detector.n_taps);
}

std::string rate_label(double rate) { return io::format_double(rate) + "GHz"; }

std::string suite_csv_name(std::size_t sequence) {
  char name[32];
  std::snprintf(name, sizeof name, "suite_seq%03zu.csv", sequence);
  return name;
}

}  // namespace

std::string config_hash(const PipelineConfig& config) {
  PipelineConfig canonical = config;
  canonical.output_dir.clear();
  return io::sha256_hex(serialize_config(canonical));
}

FrameSimulation stage_simulate(const PipelineConfig& config, const RunOptions& run) {
  return in_stage("simulate", [&] {
    config.validate();
    const fs::path dir = out_dir(config);
    EngineOptions engine = config.engine;
    engine.threads = run.threads;
    FrameSimulation sim = simulate_frames(config.laser, config.pump, config.grid, config.frames, kernel_for(config), engine);
    io::write_energies_csv(dir / "energies.csv", sim);
    if (run.trace_frames > 0) {
      SimGrid g = config.grid;
      g.n_frames = std::min<std::uint64_t>(run.trace_frames, config.grid.n_frames);
      io::write_trace_csv(dir / "trace.csv", integrate_sfm(config.laser, config.pump, g));
    }
    return sim;
  });
}

DigitizeResult stage_digitize(const PipelineConfig& config, const FrameSimulation& sim) {
  return in_stage("digitize", [&] {
    config.validate();
    const fs::path dir = out_dir(config);
    DigitizeResult r;
    r.frames = digitize_energies(sim.energies, config.energy_threshold);
    if (config.mode == DigitizerMode::comparator) {
      if (config.detector.sample_noise && !r.frames.records.empty()) {
        double total = 0.0;
        for (const auto& rec : r.frames.records) total += rec.ex + rec.ey;
        const auto [w0, w1] = window_samples(config.frames, config.grid.dt, 0);
        r.sigma_abs = calibrate_sigma_abs(config.detector.sigma, total / static_cast<double>(r.frames.records.size()),
                                          config.grid.dt, static_cast<std::size_t>(w1 - w0));
      }
      const auto latch = noisy_latch(sim, r.sigma_abs, config.detector.noise_seed);
      std::vector<double> kept;
      kept.reserve(r.frames.records.size());
      for (const auto& rec : r.frames.records) kept.push_back(latch[rec.frame]);
      r.v_th = config.comparator.auto_threshold ? (kept.empty() ? 0.0 : bimodal_midpoint(kept))
                                                : config.comparator.spec.v_th;
      for (auto& rec : r.frames.records) rec.bit = latch[rec.frame] >= r.v_th;
    }
    io::write_frames_csv(dir / "frames.csv", r.frames.records);
    io::write_bits(dir / "raw.bits", r.frames.bits());
    ordered_json meta = {{"frames", sim.energies.size()},
                         {"degenerate", r.frames.degenerate},
                         {"raw_bits", r.frames.records.size()},
                         {"mode", config.mode == DigitizerMode::energy ? "energy" : "comparator"},
                         {"v_th", r.v_th},
                         {"sigma_abs", r.sigma_abs}};
    io::write_text(dir / "digitize.json", meta.dump(2) + "\n");
    return r;
  });
}

EntropyReport stage_entropy(const PipelineConfig& config, const std::vector<FrameRecord>& records) {
  return in_stage("entropy", [&] {
    config.validate();
    const fs::path dir = out_dir(config);
    std::vector<double> sx;
    BitStream bits;
    sx.reserve(records.size());
    bits.reserve(records.size());
    for (const auto& r : records) {
      sx.push_back(r.sx);
      bits.push_back(r.bit);
    }
    if (sx.empty()) fail(ErrorCode::no_extractable_entropy, "no non-degenerate frames");
    io::write_histogram_csv(dir / "histogram.csv", histogram(sx, config.sweep.histogram_bins));
    const EntropyReport report = assess_entropy(sx, bits, config.detector.sigma, config.window_c);
    io::write_entropy_json(dir / "entropy.json", report);
    return report;
  });
}

ExtractionResult stage_extract(const PipelineConfig& config, const BitStream& raw, const EntropyReport& report) {
  return in_stage("extract", [&] {
    config.validate();
    const fs::path dir = out_dir(config);
    const ExtractionResult r = extract_pipeline(raw, report, {config.block_n, config.k, config.fir});
    io::write_bits(dir / "seed.bits", r.seed);
    io::write_bits(dir / "extracted.bits", r.output);
    ordered_json meta = {{"n", r.n},
                         {"m", r.m},
                         {"blocks", r.blocks},
                         {"raw_bits", raw.size()},
                         {"seed_bits", r.seed.size()},
                         {"seed_raw_bits", r.seed_raw_bits},
                         {"dropped_word_bits", r.dropped_word_bits},
                         {"dropped_block_bits", r.dropped_block_bits},
                         {"output_bits", r.output.size()},
                         {"gamma_tilde", report.gamma_tilde},
                         {"fir", config.fir},
                         {"k", config.k}};
    io::write_text(dir / "extraction.json", meta.dump(2) + "\n");
    return r;
  });
}

nist::SuiteReport stage_test(const PipelineConfig& config, const BitStream& bits) {
  return in_stage("test", [&] {
    config.validate();
    const fs::path dir = out_dir(config);
    std::vector<BitStream> sequences;
    if (config.sequence_bits == 0 || bits.size() < config.sequence_bits) {
      sequences.push_back(bits);
    } else {
      for (std::size_t i = 0; i + config.sequence_bits <= bits.size(); i += config.sequence_bits)
        sequences.push_back(bits.slice(i, config.sequence_bits));
    }
    const nist::SuiteReport report = nist::run_suite(sequences, config.tests);
    io::write_suite_json(dir / "suite.json", report);
    for (std::size_t s = 0; s < report.sequences.size(); ++s) {
      io::write_suite_csv(dir / suite_csv_name(s), report.sequences[s]);
    }
    return report;
  });
}

DigitizeResult digitize_from_files(const PipelineConfig& config) {
  const auto sim = in_stage("digitize", [&] { return io::read_energies_csv(fs::path(config.output_dir) / "energies.csv"); });
  return stage_digitize(config, sim);
}

EntropyReport entropy_from_files(const PipelineConfig& config) {
  const auto records = in_stage("entropy", [&] { return io::read_frames_csv(fs::path(config.output_dir) / "frames.csv"); });
  return stage_entropy(config, records);
}

ExtractionResult extract_from_files(const PipelineConfig& config) {
  const fs::path dir(config.output_dir);
  const auto raw = in_stage("extract", [&] { return io::read_bits(dir / "raw.bits"); });
  const auto report = in_stage("extract", [&] { return io::read_entropy_json(dir / "entropy.json"); });
  return stage_extract(config, raw, report);
}

nist::SuiteReport test_from_files(const PipelineConfig& config) {
  const auto bits = in_stage("test", [&] { return io::read_bits(fs::path(config.output_dir) / "extracted.bits"); });
  return stage_test(config, bits);
}

PipelineResult run_pipeline(const PipelineConfig& config, const RunOptions& run) {
  const fs::path dir = in_stage("config", [&] {
    config.validate();
    const fs::path d = out_dir(config);
    PipelineConfig local = config;
    local.output_dir = ".";
    save_config(local, (d / "config.json").string());
    return d;
  });

  PipelineResult result;
  const FrameSimulation sim = stage_simulate(config, run);
  const DigitizeResult dig = stage_digitize(config, sim);
  result.frames = sim.energies.size();
  result.degenerate = dig.frames.degenerate;
  result.raw_bits = dig.frames.records.size();
  result.entropy = stage_entropy(config, dig.frames.records);
  result.extraction = stage_extract(config, dig.frames.bits(), result.entropy);
  result.suite = stage_test(config, result.extraction.output);

  return in_stage("manifest", [&] {
    result.config_sha256 = config_hash(config);
    std::vector<std::string> names = {"config.json",   "energies.csv",        "frames.csv",     "raw.bits",
                                      "raw.bits.json", "digitize.json",       "histogram.csv",  "entropy.json",
                                      "seed.bits",     "seed.bits.json",      "extracted.bits", "extracted.bits.json",
                                      "extraction.json", "suite.json"};
    if (run.trace_frames > 0) names.push_back("trace.csv");
    for (std::size_t s = 0; s < result.suite.sequences.size(); ++s) names.push_back(suite_csv_name(s));
    std::sort(names.begin(), names.end());
    ordered_json artifacts = ordered_json::object();
    for (const auto& name : names) {
      const std::string sum = io::sha256_file(dir / name);
      result.checksums[name] = sum;
      artifacts[name] = sum;
    }
    ordered_json manifest = {{"config_sha256", result.config_sha256}, {"artifacts", artifacts}};
    io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    return result;
  });
}

std::vector<RateDataset> simulate_rates(const PipelineConfig& config, const std::vector<double>& rates,
                                        const RunOptions& run) {
  std::vector<RateDataset> out;
  for (const double rate : rates) {
    const PipelineConfig c = config.at_rate(rate);
    const FrameSimulation sim = in_stage("simulate", [&] {
      c.validate();
      EngineOptions engine = c.engine;
      engine.threads = run.threads;
      return simulate_frames(c.laser, c.pump, c.grid, c.frames, kernel_for(c), engine);
    });
    in_stage("entropy", [&] {
      RateDataset d;
      d.rep_rate = rate;
      d.frames = digitize_energies(sim.energies, c.energy_threshold);
      d.bits = d.frames.bits();
      d.sx = d.frames.sx();
      if (d.sx.empty()) fail(ErrorCode::no_extractable_entropy, "no non-degenerate frames at " + rate_label(rate));
      d.histogram = histogram(d.sx, c.sweep.histogram_bins);
      const auto inside = std::count_if(d.sx.begin(), d.sx.end(), [&](double v) {
        return v >= c.sweep.central_lo && v <= c.sweep.central_hi;
      });
      d.central_mass = static_cast<double>(inside) / static_cast<double>(d.sx.size());
      out.push_back(std::move(d));
      return 0;
    });
  }
  return out;
}

void write_fig2a(const PipelineConfig& config, const std::vector<RateDataset>& data) {
  in_stage("fig2a", [&] {
    const fs::path dir = out_dir(config);
    std::string summary = "rep_rate_ghz,frames,degenerate,central_mass,h_min\n";
    for (const auto& d : data) {
      io::write_histogram_csv(dir / ("fig2a_" + rate_label(d.rep_rate) + ".csv"), d.histogram);
      summary += io::format_double(d.rep_rate) + "," + std::to_string(d.frames.records.size() + d.frames.degenerate) +
                 "," + std::to_string(d.frames.degenerate) + "," + io::format_double(d.central_mass) + "," +
                 io::format_double(min_entropy(d.bits)) + "\n";
    }
    io::write_text(dir / "fig2a_summary.csv", summary);
    return 0;
  });
}

std::vector<RateDataset> sweep_sx_histograms(const PipelineConfig& config, const std::vector<double>& rates,
                                             const RunOptions& run) {
  auto data = simulate_rates(config, rates, run);
  write_fig2a(config, data);
  return data;
}

ReductionTable reduction_table(const std::vector<RateDataset>& data, const std::vector<double>& sigmas, double c) {
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    require(sigmas[i] >= 0, "sigmas must be >= 0");
    if (i > 0) require(sigmas[i] > sigmas[i - 1], "sigmas must be ascending");
  }
  ReductionTable t;
  t.sigmas = sigmas;
  for (const auto& d : data) {
    t.rep_rates.push_back(d.rep_rate);
    const double h = min_entropy(d.bits);
    std::vector<ReductionCell> row;
    for (const double sigma : sigmas) {
      ReductionCell cell{sigma, d.rep_rate, h, window_probability(d.sx, sigma, c), std::nullopt, {}};
      try {
        cell.gamma_tilde = reduction_factor(cell.h_min, cell.p_window);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::no_extractable_entropy) throw;
        cell.reason = e.what();
      }
      row.push_back(std::move(cell));
    }
    t.cells.push_back(std::move(row));
  }
  return t;
}

void write_fig2b(const PipelineConfig& config, const ReductionTable& table) {
  in_stage("fig2b", [&] {
    const fs::path dir = out_dir(config);
    std::string wide = "sigma";
    for (const double r : table.rep_rates) wide += ",gamma_" + rate_label(r);
    wide += "\n";
    for (std::size_t s = 0; s < table.sigmas.size(); ++s) {
      wide += io::format_double(table.sigmas[s]);
      for (const auto& row : table.cells)
        wide += "," + (row[s].gamma_tilde ? io::format_double(*row[s].gamma_tilde) : std::string());
      wide += "\n";
    }
    io::write_text(dir / "fig2b.csv", wide);

    std::string longform = "rep_rate_ghz,sigma,h_min,p_window,gamma_tilde,status\n";
    for (const auto& row : table.cells)
      for (const auto& cell : row)
        longform += io::format_double(cell.rep_rate) + "," + io::format_double(cell.sigma) + "," +
                    io::format_double(cell.h_min) + "," + io::format_double(cell.p_window) + "," +
                    (cell.gamma_tilde ? io::format_double(*cell.gamma_tilde) : std::string()) + "," +
                    (cell.gamma_tilde ? std::string("ok") : "absent: " + cell.reason) + "\n";
    io::write_text(dir / "fig2b_long.csv", longform);
    return 0;
  });
}

ReductionTable sweep_reduction_factor(const PipelineConfig& config, const std::vector<double>& sigmas,
                                      const std::vector<double>& rates, const RunOptions& run) {
  const auto data = simulate_rates(config, rates, run);
  auto table = in_stage("fig2b", [&] { return reduction_table(data, sigmas, config.window_c); });
  write_fig2b(config, table);
  return table;
}

}  // namespace vqrng
