#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vqrng/vqrng.h"

namespace {

struct Options {
  std::string config_path;
  std::uint64_t seed = 0;
  std::uint64_t frames = 0;
  std::string out;
  bool full = false;
  unsigned threads = 0;
  std::size_t trace_frames = 0;
  std::vector<std::string> overrides;
  std::vector<double> rates;
  std::vector<double> sigmas;
};

constexpr std::uint64_t kFullFrames = 1000000;
constexpr int kSuiteFailed = 3;

struct Failure {
  vqrng_status status;
};

void check(vqrng_status status) {
  if (status != VQRNG_OK) throw Failure{status};
}

class Config {
 public:
  explicit Config(const Options& o, const CLI::App& app) {
    check(o.config_path.empty() ? vqrng_config_default(&p_) : vqrng_config_load(o.config_path.c_str(), &p_));
    for (const auto& kv : o.overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value, got " + kv);
      check(vqrng_config_set(p_, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
    }
    if (app.count("--seed")) check(vqrng_config_set(p_, "grid.rng_seed", std::to_string(o.seed).c_str()));
    if (app.count("--frames")) check(vqrng_config_set(p_, "grid.n_frames", std::to_string(o.frames).c_str()));
    if (o.full) check(vqrng_config_set(p_, "grid.n_frames", std::to_string(kFullFrames).c_str()));
    if (!o.out.empty()) check(vqrng_config_set_string(p_, "output_dir", o.out.c_str()));
    check(vqrng_config_validate(p_));
  }
  ~Config() { vqrng_config_free(p_); }
  Config(const Config&) = delete;
  Config& operator=(const Config&) = delete;

  const vqrng_config* get() const { return p_; }

 private:
  vqrng_config* p_ = nullptr;
};

void print_entropy(const vqrng_entropy_summary& e) {
  std::printf("min-entropy        %.6f bits (%" PRIu64 " ones / %" PRIu64 " bits)\n", e.h_min, e.n_ones, e.n_bits);
  std::printf("untrusted window   P = %.6f\n", e.p_window);
  std::printf("reduction factor   %.6f\n", e.gamma_tilde);
}

void print_extraction(const vqrng_extraction_summary& x) {
  std::printf("toeplitz           %" PRIu64 " x %" PRIu64 ", %" PRIu64 " blocks\n", x.m, x.n, x.blocks);
  std::printf("seed               %" PRIu64 " bits from %" PRIu64 " raw bits\n", x.seed_bits, x.seed_raw_bits);
  std::printf("extracted          %" PRIu64 " bits\n", x.output_bits);
}

int print_suite(vqrng_suite* suite) {
  std::printf("%-26s %8s %10s %10s\n", "test", "passed", "p-value", "uniform-P");
  for (std::size_t i = 0; i < vqrng_suite_row_count(suite); ++i) {
    vqrng_suite_row row{};
    check(vqrng_suite_get_row(suite, i, &row));
    const std::string passed = std::to_string(row.passes) + "/" + std::to_string(row.sequences);
    char p[32] = "-", u[32] = "-";
    if (!std::isnan(row.p_value)) std::snprintf(p, sizeof p, "%.6f", row.p_value);
    if (!std::isnan(row.uniformity_p)) std::snprintf(u, sizeof u, "%.6f", row.uniformity_p);
    std::printf("%-26s %8s %10s %10s%s\n", row.name, passed.c_str(), p, u, row.errors ? "  (error)" : "");
  }
  const bool ok = vqrng_suite_all_passed(suite);
  std::printf("suite              %s\n", ok ? "all passed" : "FAILED");
  return ok ? 0 : kSuiteFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polarization-switching VCSEL random number generator"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "Laser noise seed (grid.rng_seed)");
  auto* frames = app.add_option("--frames", o.frames, "Number of pump periods to simulate")->check(CLI::PositiveNumber);
  app.add_flag("--full", o.full, "Simulate 10^6 frames")->excludes(frames);
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--threads", o.threads, "Worker threads (0: all cores)");
  app.add_option("--set", o.overrides, "Override a config value: dotted.key=<json>");

  auto* simulate = app.add_subcommand("simulate", "Integrate the laser and write per-frame energies");
  auto* digitize = app.add_subcommand("digitize", "Turn energies.csv into raw bits");
  auto* entropy = app.add_subcommand("entropy", "Min-entropy and reduction factor from frames.csv");
  auto* extract = app.add_subcommand("extract", "Seed bootstrap and Toeplitz extraction of raw.bits");
  auto* test = app.add_subcommand("test", "Statistical tests on extracted.bits");
  auto* pipeline = app.add_subcommand("pipeline", "All stages end to end plus a manifest");
  auto* fig2a = app.add_subcommand("fig2a", "S_x histograms per repetition rate");
  auto* fig2b = app.add_subcommand("fig2b", "Reduction factor versus detector noise per rate");
  auto* show = app.add_subcommand("config", "Print the effective configuration");
  for (auto* sub : {simulate, pipeline})
    sub->add_option("--trace-frames", o.trace_frames, "Also write trace.csv for this many frames");
  for (auto* sub : {fig2a, fig2b})
    sub->add_option("--rates", o.rates, "Repetition rates in GHz (default: sweep.rep_rates)")->delimiter(',');
  fig2b->add_option("--sigmas", o.sigmas, "Detector noise levels, ascending (default: sweep.sigmas)")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    const Config cfg(o, app);
    const vqrng_run_options run{o.threads, o.trace_frames};

    if (*show) {
      char* json = nullptr;
      check(vqrng_config_to_json(cfg.get(), &json));
      std::fputs(json, stdout);
      vqrng_string_free(json);
      return 0;
    }
    if (*simulate) {
      std::uint64_t n = 0;
      check(vqrng_stage_simulate(cfg.get(), &run, &n));
      std::printf("simulated          %" PRIu64 " frames\n", n);
      return 0;
    }
    if (*digitize) {
      std::uint64_t raw = 0, degenerate = 0;
      check(vqrng_stage_digitize(cfg.get(), &raw, &degenerate));
      std::printf("raw bits           %" PRIu64 " (%" PRIu64 " degenerate frames skipped)\n", raw, degenerate);
      return 0;
    }
    if (*entropy) {
      vqrng_entropy_summary e{};
      check(vqrng_stage_entropy(cfg.get(), &e));
      print_entropy(e);
      return 0;
    }
    if (*extract) {
      vqrng_extraction_summary x{};
      check(vqrng_stage_extract(cfg.get(), &x));
      print_extraction(x);
      return 0;
    }
    if (*test) {
      vqrng_suite* suite = nullptr;
      check(vqrng_stage_test(cfg.get(), &suite));
      const int rc = print_suite(suite);
      vqrng_suite_free(suite);
      return rc;
    }
    if (*pipeline) {
      vqrng_pipeline_summary s{};
      vqrng_suite* suite = nullptr;
      check(vqrng_run_pipeline(cfg.get(), &run, &s, &suite));
      std::printf("frames             %" PRIu64 " (%" PRIu64 " degenerate)\n", s.frames, s.degenerate);
      std::printf("raw bits           %" PRIu64 "\n", s.raw_bits);
      print_entropy(s.entropy);
      print_extraction(s.extraction);
      const int rc = print_suite(suite);
      vqrng_suite_free(suite);
      std::printf("config sha256      %s\n", s.config_sha256);
      return rc;
    }

    // Sweeps fall back to the rates and sigmas stored in the config.
    auto from_config = [&](const char* key, std::vector<double>& into) {
      if (!into.empty()) return;
      char* json = nullptr;
      check(vqrng_config_get(cfg.get(), key, &json));
      into = nlohmann::json::parse(json).get<std::vector<double>>();
      vqrng_string_free(json);
    };
    from_config("sweep.rep_rates", o.rates);
    if (*fig2a) {
      std::vector<double> mass(o.rates.size());
      check(vqrng_fig2a(cfg.get(), o.rates.data(), o.rates.size(), &run, mass.data()));
      for (std::size_t i = 0; i < o.rates.size(); ++i)
        std::printf("%6g GHz  central mass %.6f\n", o.rates[i], mass[i]);
      return 0;
    }
    from_config("sweep.sigmas", o.sigmas);
    std::vector<double> gamma(o.rates.size() * o.sigmas.size());
    check(vqrng_fig2b(cfg.get(), o.sigmas.data(), o.sigmas.size(), o.rates.data(), o.rates.size(), &run, gamma.data()));
    std::printf("%8s", "sigma");
    for (double r : o.rates) std::printf("  %9gGHz", r);
    std::printf("\n");
    for (std::size_t s = 0; s < o.sigmas.size(); ++s) {
      std::printf("%8g", o.sigmas[s]);
      for (std::size_t r = 0; r < o.rates.size(); ++r) {
        const double g = gamma[r * o.sigmas.size() + s];
        if (std::isnan(g)) std::printf("  %12s", "absent");
        else std::printf("  %12.6f", g);
      }
      std::printf("\n");
    }
    return 0;
  } catch (const Failure& f) {
    std::fprintf(stderr, "error [%s]: %s\n", vqrng_status_name(f.status), vqrng_last_error());
    return 1;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  }
}
