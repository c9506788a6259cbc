#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vqrng/error.hpp"
#include "vqrng/io.hpp"
#include "vqrng/pipeline.hpp"

using namespace vqrng;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("vqrng_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

PipelineConfig small_config(const fs::path& dir, std::uint64_t frames = 6000) {
  PipelineConfig c = PipelineConfig{}.at_rate(7.0);
  c.grid.n_frames = frames;
  c.block_n = 256;
  c.engine.segment_frames = 500;
  c.output_dir = dir.string();
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("end-to-end run writes a consistent artifact set") {
  const auto dir = scratch("e2e");
  const auto c = small_config(dir);
  const auto r = run_pipeline(c, {2, 5});
  CHECK(r.frames == 6000);
  CHECK(r.raw_bits + r.degenerate == 6000);
  CHECK(r.extraction.output.size() > 0);
  CHECK(r.extraction.output.size() == r.extraction.blocks * r.extraction.m);
  CHECK(r.config_sha256 == config_hash(c));
  CHECK(r.checksums.contains("trace.csv"));
  CHECK(r.checksums.contains("suite_seq000.csv"));
  for (const auto& [name, sum] : r.checksums) {
    INFO(name);
    CHECK(io::sha256_file(dir / name) == sum);
  }
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(parse_config(slurp(dir / "config.json")).output_dir == ".");
  CHECK(io::read_bits(dir / "extracted.bits") == r.extraction.output);
}

TEST_CASE("runs are deterministic and independent of thread count") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  const auto ra = run_pipeline(small_config(a, 3000), {1, 0});
  const auto rb = run_pipeline(small_config(b, 3000), {3, 0});
  CHECK(ra.checksums == rb.checksums);
  CHECK(ra.config_sha256 == rb.config_sha256);
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
}

TEST_CASE("stages fed from files reproduce the in-memory run") {
  const auto dir = scratch("files");
  const auto c = small_config(dir, 3000);
  const auto r = run_pipeline(c);
  const auto before = r.checksums;

  const auto d = digitize_from_files(c);
  CHECK(d.frames.records.size() == r.raw_bits);
  const auto e = entropy_from_files(c);
  CHECK(e.h_min == r.entropy.h_min);
  CHECK(e.gamma_tilde == r.entropy.gamma_tilde);
  const auto x = extract_from_files(c);
  CHECK(x.output == r.extraction.output);
  test_from_files(c);
  for (const auto& [name, sum] : before) {
    if (name == "config.json") continue;
    INFO(name);
    CHECK(io::sha256_file(dir / name) == sum);
  }
}

TEST_CASE("a laser that never lases aborts at the entropy stage") {
  const auto dir = scratch("dark");
  auto c = small_config(dir, 200);
  c.laser.beta_sp = 0.0;
  try {
    run_pipeline(c);
    FAIL("expected an entropy-stage failure");
  } catch (const StageError& e) {
    CHECK(e.stage() == "entropy");
    CHECK(e.code() == ErrorCode::no_extractable_entropy);
  }
}

TEST_CASE("comparator mode agrees with energy mode") {
  const auto dir = scratch("cmp");
  auto c = small_config(dir, 2000);
  const auto sim = stage_simulate(c);
  const auto energy = stage_digitize(c, sim);
  c.mode = DigitizerMode::comparator;
  const auto cmp = stage_digitize(c, sim);
  REQUIRE(cmp.frames.records.size() == energy.frames.records.size());
  // Frames with a clearly dominant mode must agree; mixed frames may not.
  std::size_t same = 0, clear = 0, clear_same = 0;
  for (std::size_t i = 0; i < cmp.frames.records.size(); ++i) {
    const bool agree = cmp.frames.records[i].bit == energy.frames.records[i].bit;
    same += agree;
    if (std::abs(energy.frames.records[i].sx - 0.5) > 0.1) {
      ++clear;
      clear_same += agree;
    }
  }
  CHECK(static_cast<double>(clear_same) / static_cast<double>(clear) > 0.99);
  CHECK(static_cast<double>(same) / static_cast<double>(cmp.frames.records.size()) > 0.9);
  CHECK(cmp.v_th > 0.0);
}

TEST_CASE("rate sweeps") {
  const auto dir = scratch("sweep");
  auto c = small_config(dir, 1500);
  const auto data = sweep_sx_histograms(c, {2.5, 7.0});
  REQUIRE(data.size() == 2);
  CHECK(fs::exists(dir / "fig2a_2.5GHz.csv"));
  CHECK(fs::exists(dir / "fig2a_7GHz.csv"));
  CHECK(fs::exists(dir / "fig2a_summary.csv"));
  for (const auto& d : data) {
    CHECK(d.sx.size() + d.frames.degenerate == 1500);
    CHECK(d.central_mass >= 0.0);
    CHECK(d.central_mass <= 1.0);
  }

  const auto t = reduction_table(data, {0.0, 0.05, 0.5}, 6.0);
  REQUIRE(t.cells.size() == 2);
  for (const auto& row : t.cells) {
    REQUIRE(row.size() == 3);
    CHECK(row[0].gamma_tilde);
    CHECK(*row[0].gamma_tilde == doctest::Approx(1.0 / row[0].h_min));
    CHECK(*row[1].gamma_tilde >= *row[0].gamma_tilde);
    CHECK_FALSE(row[2].gamma_tilde);  // window covers [0, 1]
    CHECK_FALSE(row[2].reason.empty());
  }
  write_fig2b(c, t);
  const auto wide = slurp(dir / "fig2b.csv");
  CHECK(wide.starts_with("sigma,gamma_2.5GHz,gamma_7GHz\n"));
  CHECK(wide.find("\n0.5,,\n") != std::string::npos);
  CHECK(fs::exists(dir / "fig2b_long.csv"));
}
