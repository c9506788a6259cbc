#include "doctest.h"

#include <filesystem>

#include "vqrng/config.hpp"
#include "vqrng/error.hpp"
#include "vqrng/pipeline.hpp"

using namespace vqrng;

namespace {
ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::io;
}
}  // namespace

TEST_CASE("defaults validate and round-trip") {
  PipelineConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(parse_config(serialize_config(c)) == c);

  c.laser.gamma_a = 0.123456789012345;
  c.mode = DigitizerMode::comparator;
  c.comparator.auto_threshold = false;
  c.comparator.spec.v_th = 0.7;
  c.tests.tests = {nist::TestId::runs, nist::TestId::dft};
  c.sweep.sigmas = {0.0, 0.5};
  c.detector.sample_noise = true;
  c.output_dir = "elsewhere";
  CHECK(parse_config(serialize_config(c)) == c);

  const auto path = std::filesystem::temp_directory_path() / "vqrng_cfg_roundtrip.json";
  save_config(c, path.string());
  CHECK(load_config(path.string()) == c);
  std::filesystem::remove(path);
}

TEST_CASE("parse errors") {
  CHECK(code_of([] { parse_config(R"({"laser": {"kapa": 1}})"); }) == ErrorCode::parse);
  CHECK(code_of([] { parse_config(R"({"colour": 1})"); }) == ErrorCode::parse);
  CHECK(code_of([] { parse_config(R"({"laser": {"kappa": "fast"}})"); }) == ErrorCode::parse);
  CHECK(code_of([] { parse_config("{not json"); }) == ErrorCode::parse);
  CHECK(code_of([] { parse_config(R"({"digitizer": {"mode": "analog"}})"); }) == ErrorCode::parse);
  CHECK(code_of([] { parse_config(R"({"tests": {"enabled": ["rank"]}})"); }) == ErrorCode::parse);
  CHECK(code_of([] { load_config("/nonexistent/cfg.json"); }) == ErrorCode::io);
}

TEST_CASE("partial files keep defaults and derive the frame layout") {
  const auto c = parse_config(R"({"pump": {"rep_rate": 5.0}, "grid": {"n_frames": 10}})");
  CHECK(c.laser == VcselParams{});
  CHECK(c.pump.rep_rate == 5.0);
  CHECK(c.grid.n_frames == 10);
  CHECK(c.frames.period == doctest::Approx(0.2));
  CHECK(c.frames.latch_offset == doctest::Approx(0.05));
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("cross-field validation") {
  PipelineConfig c;
  c.pump.rep_rate = 5.0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::invalid_argument);
  c = PipelineConfig{}.at_rate(5.0);
  CHECK_NOTHROW(c.validate());
  CHECK(c.frames == FrameSpec::for_waveform(c.pump));
  c.k = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = PipelineConfig{};
  c.block_n = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("dotted overrides") {
  PipelineConfig c;
  set_config_value(c, "laser.gamma_a", "0.3");
  CHECK(c.laser.gamma_a == 0.3);
  set_config_value(c, "digitizer.mode", "\"comparator\"");
  CHECK(c.mode == DigitizerMode::comparator);
  set_config_value(c, "pump.rep_rate", "7");
  CHECK(c.pump.rep_rate == 7.0);
  CHECK(c.frames.period == doctest::Approx(1.0 / 7.0));
  CHECK_NOTHROW(c.validate());
  CHECK(code_of([&] { set_config_value(c, "laser.nope", "1"); }) == ErrorCode::parse);
  CHECK(code_of([&] { set_config_value(c, "laser.kappa", "oops"); }) == ErrorCode::parse);
}

TEST_CASE("config hash ignores the output directory") {
  PipelineConfig a, b;
  b.output_dir = "/tmp/somewhere/else";
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 64);
  b.grid.rng_seed = 2;
  CHECK(config_hash(a) != config_hash(b));
}
