#include "vqrng/vqrng.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>

#include "json.hpp"

#include "vqrng/config.hpp"
#include "vqrng/entropy.hpp"
#include "vqrng/error.hpp"
#include "vqrng/extractors.hpp"
#include "vqrng/io.hpp"
#include "vqrng/pipeline.hpp"
#include "vqrng/stat_suite.hpp"

struct vqrng_config {
  vqrng::PipelineConfig value;
};

struct vqrng_bits {
  vqrng::BitStream value;
};

struct vqrng_suite {
  vqrng::nist::SuiteReport value;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_stage;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

vqrng_status record(vqrng_status status, const std::string& message, const std::string& stage = {}) {
  last_error = message;
  last_stage = stage;
  return status;
}

template <class F>
vqrng_status guarded(F&& body) {
  last_error.clear();
  last_stage.clear();
  try {
    body();
    return VQRNG_OK;
  } catch (const vqrng::StageError& e) {
    return record(static_cast<vqrng_status>(e.code()), e.what(), e.stage());
  } catch (const vqrng::Error& e) {
    return record(static_cast<vqrng_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return record(VQRNG_OUT_OF_MEMORY, "out of memory");
  } catch (const std::exception& e) {
    return record(VQRNG_INTERNAL, e.what());
  } catch (...) {
    return record(VQRNG_INTERNAL, "unknown failure");
  }
}

void need(const void* p, const char* what) {
  if (!p) vqrng::fail(vqrng::ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

vqrng::RunOptions run_options(const vqrng_run_options* options) {
  vqrng::RunOptions run;
  if (options) {
    run.threads = options->threads;
    run.trace_frames = options->trace_frames;
  }
  return run;
}

void fill(vqrng_entropy_summary* out, const vqrng::EntropyReport& r) {
  if (!out) return;
  *out = {r.h_min, r.p_window, r.gamma_tilde, r.n_bits, r.n_ones};
}

void fill(vqrng_extraction_summary* out, const vqrng::ExtractionResult& r) {
  if (!out) return;
  *out = {r.n, r.m, r.blocks, r.seed.size(), r.seed_raw_bits, r.output.size()};
}

}  // namespace

extern "C" {

const char* vqrng_last_error(void) { return last_error.c_str(); }
const char* vqrng_last_error_stage(void) { return last_stage.c_str(); }

const char* vqrng_status_name(vqrng_status status) {
  switch (status) {
    case VQRNG_OK: return "ok";
    case VQRNG_OUT_OF_MEMORY: return "out-of-memory";
    case VQRNG_INTERNAL: return "internal";
    default: break;
  }
  if (status >= VQRNG_INVALID_ARGUMENT && status <= VQRNG_PARSE)
    return vqrng::error_code_name(static_cast<vqrng::ErrorCode>(status));
  return "unknown";
}

const char* vqrng_version(void) { return "0.1.0"; }

void vqrng_string_free(char* s) { delete[] s; }

vqrng_status vqrng_config_default(vqrng_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new vqrng_config{};
  });
}

vqrng_status vqrng_config_load(const char* path, vqrng_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new vqrng_config{vqrng::load_config(path)};
  });
}

vqrng_status vqrng_config_parse(const char* json, vqrng_config** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new vqrng_config{vqrng::parse_config(json)};
  });
}

vqrng_status vqrng_config_save(const vqrng_config* config, const char* path) {
  return guarded([&] {
    need(config, "config");
    need(path, "path");
    vqrng::save_config(config->value, path);
  });
}

vqrng_status vqrng_config_to_json(const vqrng_config* config, char** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    *out = dup_string(vqrng::serialize_config(config->value));
  });
}

vqrng_status vqrng_config_set(vqrng_config* config, const char* key, const char* json_value) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    need(json_value, "json_value");
    vqrng::set_config_value(config->value, key, json_value);
  });
}

vqrng_status vqrng_config_get(const vqrng_config* config, const char* key, char** json_value) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    need(json_value, "json_value");
    const auto doc = nlohmann::ordered_json::parse(vqrng::serialize_config(config->value));
    const nlohmann::ordered_json* node = &doc;
    std::string path(key);
    for (std::size_t start = 0; start <= path.size();) {
      const std::size_t dot = std::min(path.find('.', start), path.size());
      const std::string part = path.substr(start, dot - start);
      if (!node->is_object() || !node->contains(part))
        vqrng::fail(vqrng::ErrorCode::parse, "unknown config key '" + path + "'");
      node = &(*node)[part];
      start = dot + 1;
    }
    *json_value = dup_string(node->dump());
  });
}

vqrng_status vqrng_config_set_string(vqrng_config* config, const char* key, const char* value) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    need(value, "value");
    vqrng::set_config_value(config->value, key, nlohmann::json(std::string(value)).dump());
  });
}

vqrng_status vqrng_config_validate(const vqrng_config* config) {
  return guarded([&] {
    need(config, "config");
    config->value.validate();
  });
}

vqrng_status vqrng_config_hash(const vqrng_config* config, char out[65]) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    const std::string h = vqrng::config_hash(config->value);
    std::memcpy(out, h.c_str(), 65);
  });
}

void vqrng_config_free(vqrng_config* config) { delete config; }

vqrng_status vqrng_bits_from_array(const uint8_t* bits, size_t count, vqrng_bits** out) {
  return guarded([&] {
    if (count > 0) need(bits, "bits");
    need(out, "out");
    *out = new vqrng_bits{vqrng::BitStream::from_bits({bits, count})};
  });
}

vqrng_status vqrng_bits_read(const char* path, vqrng_bits** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new vqrng_bits{vqrng::io::read_bits(path)};
  });
}

vqrng_status vqrng_bits_write(const vqrng_bits* bits, const char* path) {
  return guarded([&] {
    need(bits, "bits");
    need(path, "path");
    vqrng::io::write_bits(path, bits->value);
  });
}

size_t vqrng_bits_size(const vqrng_bits* bits) { return bits ? bits->value.size() : 0; }

vqrng_status vqrng_bits_copy(const vqrng_bits* bits, uint8_t* out, size_t capacity) {
  return guarded([&] {
    need(bits, "bits");
    if (capacity > 0) need(out, "out");
    const size_t n = std::min(capacity, bits->value.size());
    for (size_t i = 0; i < n; ++i) out[i] = bits->value[i] ? 1 : 0;
  });
}

void vqrng_bits_free(vqrng_bits* bits) { delete bits; }

vqrng_status vqrng_min_entropy(const vqrng_bits* bits, double* out) {
  return guarded([&] {
    need(bits, "bits");
    need(out, "out");
    *out = vqrng::min_entropy(bits->value);
  });
}

vqrng_status vqrng_window_probability(const double* sx, size_t count, double sigma, double c, double* out) {
  return guarded([&] {
    if (count > 0) need(sx, "sx");
    need(out, "out");
    *out = vqrng::window_probability({sx, count}, sigma, c);
  });
}

vqrng_status vqrng_reduction_factor(double h_min, double p_window, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = vqrng::reduction_factor(h_min, p_window);
  });
}

vqrng_status vqrng_von_neumann(const vqrng_bits* raw, vqrng_bits** out) {
  return guarded([&] {
    need(raw, "raw");
    need(out, "out");
    *out = new vqrng_bits{vqrng::von_neumann(raw->value)};
  });
}

vqrng_status vqrng_toeplitz_extract(size_t m, size_t n, const vqrng_bits* seed, const vqrng_bits* raw,
                                    vqrng_bits** out) {
  return guarded([&] {
    need(seed, "seed");
    need(raw, "raw");
    need(out, "out");
    const auto spec = vqrng::build_toeplitz(m, n, seed->value);
    *out = new vqrng_bits{vqrng::toeplitz_extract(spec, raw->value)};
  });
}

vqrng_status vqrng_suite_run(const vqrng_config* config, const vqrng_bits* bits, size_t sequence_bits,
                             vqrng_suite** out) {
  return guarded([&] {
    need(config, "config");
    need(bits, "bits");
    need(out, "out");
    std::vector<vqrng::BitStream> sequences;
    const auto& b = bits->value;
    if (sequence_bits == 0 || b.size() < sequence_bits) {
      sequences.push_back(b);
    } else {
      for (size_t i = 0; i + sequence_bits <= b.size(); i += sequence_bits) sequences.push_back(b.slice(i, sequence_bits));
    }
    *out = new vqrng_suite{vqrng::nist::run_suite(sequences, config->value.tests)};
  });
}

size_t vqrng_suite_row_count(const vqrng_suite* suite) { return suite ? suite->value.summary.size() : 0; }

vqrng_status vqrng_suite_get_row(const vqrng_suite* suite, size_t index, vqrng_suite_row* out) {
  return guarded([&] {
    need(suite, "suite");
    need(out, "out");
    const auto& report = suite->value;
    if (index >= report.summary.size())
      vqrng::fail(vqrng::ErrorCode::invalid_argument, "row " + std::to_string(index) + " out of range");
    const auto& s = report.summary[index];
    out->name = s.name.c_str();
    out->sequences = s.sequences;
    out->passes = s.passes;
    out->errors = s.errors;
    out->pass_proportion = s.pass_proportion;
    out->proportion_threshold = s.proportion_threshold;
    out->p_value = kNaN;
    if (report.sequences.size() == 1)
      for (const auto& row : report.sequences[0])
        if (row.name == s.name && row.result) out->p_value = row.result->p_value;
    out->uniformity_p = s.uniformity_p.value_or(kNaN);
  });
}

int vqrng_suite_all_passed(const vqrng_suite* suite) { return suite && suite->value.all_passed() ? 1 : 0; }

void vqrng_suite_free(vqrng_suite* suite) { delete suite; }

vqrng_status vqrng_stage_simulate(const vqrng_config* config, const vqrng_run_options* options, uint64_t* frames) {
  return guarded([&] {
    need(config, "config");
    const auto sim = vqrng::stage_simulate(config->value, run_options(options));
    if (frames) *frames = sim.energies.size();
  });
}

vqrng_status vqrng_stage_digitize(const vqrng_config* config, uint64_t* raw_bits, uint64_t* degenerate) {
  return guarded([&] {
    need(config, "config");
    const auto r = vqrng::digitize_from_files(config->value);
    if (raw_bits) *raw_bits = r.frames.records.size();
    if (degenerate) *degenerate = r.frames.degenerate;
  });
}

vqrng_status vqrng_stage_entropy(const vqrng_config* config, vqrng_entropy_summary* out) {
  return guarded([&] {
    need(config, "config");
    fill(out, vqrng::entropy_from_files(config->value));
  });
}

vqrng_status vqrng_stage_extract(const vqrng_config* config, vqrng_extraction_summary* out) {
  return guarded([&] {
    need(config, "config");
    fill(out, vqrng::extract_from_files(config->value));
  });
}

vqrng_status vqrng_stage_test(const vqrng_config* config, vqrng_suite** out) {
  return guarded([&] {
    need(config, "config");
    auto report = vqrng::test_from_files(config->value);
    if (out) *out = new vqrng_suite{std::move(report)};
  });
}

vqrng_status vqrng_run_pipeline(const vqrng_config* config, const vqrng_run_options* options,
                                vqrng_pipeline_summary* summary, vqrng_suite** suite) {
  return guarded([&] {
    need(config, "config");
    auto r = vqrng::run_pipeline(config->value, run_options(options));
    if (summary) {
      summary->frames = r.frames;
      summary->degenerate = r.degenerate;
      summary->raw_bits = r.raw_bits;
      fill(&summary->entropy, r.entropy);
      fill(&summary->extraction, r.extraction);
      std::memcpy(summary->config_sha256, r.config_sha256.c_str(), 65);
    }
    if (suite) *suite = new vqrng_suite{std::move(r.suite)};
  });
}

vqrng_status vqrng_fig2a(const vqrng_config* config, const double* rates, size_t n_rates,
                         const vqrng_run_options* options, double* central_mass) {
  return guarded([&] {
    need(config, "config");
    need(rates, "rates");
    const auto data = vqrng::sweep_sx_histograms(config->value, {rates, rates + n_rates}, run_options(options));
    if (central_mass)
      for (size_t i = 0; i < data.size(); ++i) central_mass[i] = data[i].central_mass;
  });
}

vqrng_status vqrng_fig2b(const vqrng_config* config, const double* sigmas, size_t n_sigmas, const double* rates,
                         size_t n_rates, const vqrng_run_options* options, double* gamma) {
  return guarded([&] {
    need(config, "config");
    need(sigmas, "sigmas");
    need(rates, "rates");
    const auto table = vqrng::sweep_reduction_factor(config->value, {sigmas, sigmas + n_sigmas},
                                                     {rates, rates + n_rates}, run_options(options));
    if (gamma)
      for (size_t r = 0; r < table.cells.size(); ++r)
        for (size_t s = 0; s < table.cells[r].size(); ++s)
          gamma[r * n_sigmas + s] = table.cells[r][s].gamma_tilde.value_or(kNaN);
  });
}

}  // extern "C"
