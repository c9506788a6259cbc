#include "vqrng/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vqrng/error.hpp"

namespace vqrng {

using nlohmann::ordered_json;

void PipelineConfig::validate() const {
  laser.validate();
  pump.validate();
  grid.validate(pump);
  engine.validate();
  detector.validate();
  frames.validate();
  if (std::abs(frames.period - pump.period()) > 1e-9 * pump.period())
    fail(ErrorCode::invalid_argument, "frames.period = " + std::to_string(frames.period) +
                                          " ns does not match 1 / pump.rep_rate = " + std::to_string(pump.period()) + " ns");
  require(std::isfinite(comparator.spec.v_th), "comparator threshold must be finite");
  require(energy_threshold >= 0 && energy_threshold <= 1, "energy threshold must lie in [0, 1]");
  require(window_c > 0, "window constant must be > 0");
  require(block_n >= 2, "block_n must be >= 2");
  require(k >= 1 && k <= 32, "word width k must lie in [1, 32]");
  require(tests.alpha > 0 && tests.alpha < 1, "tests.alpha must lie in (0, 1)");
  require(sweep.histogram_bins >= 2, "sweep.histogram_bins must be >= 2");
  require(sweep.central_lo < sweep.central_hi, "sweep central window is empty");
  for (std::size_t i = 0; i < sweep.sigmas.size(); ++i) {
    require(sweep.sigmas[i] >= 0, "sweep sigmas must be >= 0");
    if (i > 0) require(sweep.sigmas[i] > sweep.sigmas[i - 1], "sweep sigmas must be ascending");
  }
  for (const double r : sweep.rep_rates) require(r > 0, "sweep rates must be > 0");
}

PipelineConfig PipelineConfig::at_rate(double rep_rate) const {
  PipelineConfig out = *this;
  out.pump.rep_rate = rep_rate;
  const double scale = out.pump.period() / frames.period;
  out.frames = {out.pump.period(), frames.latch_offset * scale, frames.window_start * scale, frames.window_end * scale};
  return out;
}

namespace {

ordered_json to_json(const PipelineConfig& c) {
  ordered_json j;
  j["laser"] = {{"kappa", c.laser.kappa},     {"alpha", c.laser.alpha},     {"gamma_n", c.laser.gamma_n},
                {"gamma_s", c.laser.gamma_s}, {"gamma_a", c.laser.gamma_a}, {"gamma_p", c.laser.gamma_p},
                {"beta_sp", c.laser.beta_sp}};
  j["pump"] = {{"rep_rate", c.pump.rep_rate}, {"duty", c.pump.duty}, {"mu_off", c.pump.mu_off}, {"mu_on", c.pump.mu_on}};
  j["grid"] = {{"dt", c.grid.dt}, {"n_frames", c.grid.n_frames}, {"rng_seed", c.grid.rng_seed}};
  j["engine"] = {{"segment_frames", c.engine.segment_frames}, {"warmup_frames", c.engine.warmup_frames}};
  j["detector"] = {{"bandwidth", c.detector.bandwidth},
                   {"sigma", c.detector.sigma},
                   {"noise_seed", c.detector.noise_seed},
                   {"n_taps", c.detector.n_taps},
                   {"sample_noise", c.detector.sample_noise}};
  j["frames"] = {{"period", c.frames.period},
                 {"latch_offset", c.frames.latch_offset},
                 {"window_start", c.frames.window_start},
                 {"window_end", c.frames.window_end}};
  j["comparator"] = {{"auto_threshold", c.comparator.auto_threshold}, {"v_th", c.comparator.spec.v_th}};
  j["digitizer"] = {{"mode", c.mode == DigitizerMode::energy ? "energy" : "comparator"},
                    {"energy_threshold", c.energy_threshold}};
  j["window_c"] = c.window_c;
  j["block_n"] = c.block_n;
  j["k"] = c.k;
  j["fir"] = c.fir;
  ordered_json names = ordered_json::array();
  for (const auto id : c.tests.tests) names.push_back(nist::test_name(id));
  j["tests"] = {{"alpha", c.tests.alpha},       {"enabled", names},
                {"block_m", c.tests.block_m},   {"apen_m", c.tests.apen_m},
                {"serial_m", c.tests.serial_m}, {"sequence_bits", c.sequence_bits}};
  j["sweep"] = {{"rep_rates", c.sweep.rep_rates},
                {"sigmas", c.sweep.sigmas},
                {"histogram_bins", c.sweep.histogram_bins},
                {"central_lo", c.sweep.central_lo},
                {"central_hi", c.sweep.central_hi}};
  j["output_dir"] = c.output_dir;
  return j;
}

// Reads the members of one JSON object, rejecting keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const ordered_json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorCode::parse, where() + " must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <typename T>
  void get(const char* key, T& field) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const auto& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
        if (v.is_number_integer() && !v.is_number_unsigned() && v.template get<long long>() < 0)
          throw std::invalid_argument("expected a non-negative integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw std::invalid_argument("expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("expected a string");
      }
      field = v.template get<T>();
    } catch (const std::exception& e) {
      fail(ErrorCode::parse, where() + "." + key + ": " + e.what());
    }
  }

  ObjectReader child(const char* key) {
    seen_.insert(key);
    return ObjectReader(j_.contains(key) ? j_.at(key) : empty(), path_.empty() ? key : path_ + "." + key);
  }

  const ordered_json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) fail(ErrorCode::parse, "unknown key '" + key + "' in " + where());
  }

 private:
  static const ordered_json& empty() {
    static const ordered_json e = ordered_json::object();
    return e;
  }
  std::string where() const { return path_.empty() ? "config" : path_; }

  const ordered_json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

PipelineConfig from_json(const ordered_json& j) {
  PipelineConfig c;
  ObjectReader root(j, "");
  {
    auto r = root.child("laser");
    r.get("kappa", c.laser.kappa);
    r.get("alpha", c.laser.alpha);
    r.get("gamma_n", c.laser.gamma_n);
    r.get("gamma_s", c.laser.gamma_s);
    r.get("gamma_a", c.laser.gamma_a);
    r.get("gamma_p", c.laser.gamma_p);
    r.get("beta_sp", c.laser.beta_sp);
    r.finish();
  }
  {
    auto r = root.child("pump");
    r.get("rep_rate", c.pump.rep_rate);
    r.get("duty", c.pump.duty);
    r.get("mu_off", c.pump.mu_off);
    r.get("mu_on", c.pump.mu_on);
    r.finish();
  }
  {
    auto r = root.child("grid");
    r.get("dt", c.grid.dt);
    r.get("n_frames", c.grid.n_frames);
    r.get("rng_seed", c.grid.rng_seed);
    r.finish();
  }
  {
    auto r = root.child("engine");
    r.get("segment_frames", c.engine.segment_frames);
    r.get("warmup_frames", c.engine.warmup_frames);
    r.finish();
  }
  {
    auto r = root.child("detector");
    r.get("bandwidth", c.detector.bandwidth);
    r.get("sigma", c.detector.sigma);
    r.get("noise_seed", c.detector.noise_seed);
    r.get("n_taps", c.detector.n_taps);
    r.get("sample_noise", c.detector.sample_noise);
    r.finish();
  }
  if (root.has("frames")) {
    auto r = root.child("frames");
    c.frames = FrameSpec::for_waveform(c.pump);
    r.get("period", c.frames.period);
    r.get("latch_offset", c.frames.latch_offset);
    r.get("window_start", c.frames.window_start);
    r.get("window_end", c.frames.window_end);
    r.finish();
  } else {
    c.frames = FrameSpec::for_waveform(c.pump);
  }
  {
    auto r = root.child("comparator");
    r.get("auto_threshold", c.comparator.auto_threshold);
    r.get("v_th", c.comparator.spec.v_th);
    r.finish();
  }
  {
    auto r = root.child("digitizer");
    std::string mode = "energy";
    r.get("mode", mode);
    if (mode == "energy") c.mode = DigitizerMode::energy;
    else if (mode == "comparator") c.mode = DigitizerMode::comparator;
    else fail(ErrorCode::parse, "digitizer.mode must be \"energy\" or \"comparator\", got \"" + mode + "\"");
    r.get("energy_threshold", c.energy_threshold);
    r.finish();
  }
  root.get("window_c", c.window_c);
  root.get("block_n", c.block_n);
  root.get("k", c.k);
  root.get("fir", c.fir);
  {
    auto r = root.child("tests");
    r.get("alpha", c.tests.alpha);
    std::vector<std::string> names;
    for (const auto id : c.tests.tests) names.emplace_back(nist::test_name(id));
    r.get("enabled", names);
    c.tests.tests.clear();
    for (const auto& name : names) {
      const auto id = nist::parse_test_name(name);
      if (!id) fail(ErrorCode::parse, "tests.enabled: unknown test '" + name + "'");
      c.tests.tests.push_back(*id);
    }
    r.get("block_m", c.tests.block_m);
    r.get("apen_m", c.tests.apen_m);
    r.get("serial_m", c.tests.serial_m);
    r.get("sequence_bits", c.sequence_bits);
    r.finish();
  }
  {
    auto r = root.child("sweep");
    r.get("rep_rates", c.sweep.rep_rates);
    r.get("sigmas", c.sweep.sigmas);
    r.get("histogram_bins", c.sweep.histogram_bins);
    r.get("central_lo", c.sweep.central_lo);
    r.get("central_hi", c.sweep.central_hi);
    r.finish();
  }
  root.get("output_dir", c.output_dir);
  root.finish();
  return c;
}

ordered_json parse_text(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::parse, std::string("config is not valid JSON: ") + e.what());
  }
}

}  // namespace

std::string serialize_config(const PipelineConfig& config) { return to_json(config).dump(2) + "\n"; }

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig c = from_json(parse_text(text));
  c.validate();
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void save_config(const PipelineConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write config file " + path);
  out << serialize_config(config);
  if (!out) fail(ErrorCode::io, "failed writing config file " + path);
}

void set_config_value(PipelineConfig& config, const std::string& dotted_key, const std::string& json_value) {
  if (dotted_key == "pump.rep_rate") {
    const auto v = parse_text(json_value);
    if (!v.is_number()) fail(ErrorCode::parse, "pump.rep_rate must be a number");
    config = config.at_rate(v.get<double>());
    config.validate();
    return;
  }
  ordered_json j = to_json(config);
  std::string pointer = "/" + dotted_key;
  for (auto& ch : pointer)
    if (ch == '.') ch = '/';
  const ordered_json::json_pointer ptr(pointer);
  if (!j.contains(ptr)) fail(ErrorCode::parse, "unknown config key '" + dotted_key + "'");
  j[ptr] = parse_text(json_value);
  PipelineConfig updated = from_json(j);
  updated.validate();
  config = std::move(updated);
}

}  // namespace vqrng
