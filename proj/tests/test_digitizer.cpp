#include "doctest.h"

#include <random>

#include "vqrng/digitizer.hpp"
#include "vqrng/error.hpp"

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

TEST_CASE("frame spec validation") {
  FrameSpec s{0.4, 0.1, 0.0, 0.4};
  CHECK_NOTHROW(s.validate());
  CHECK_THROWS_AS((FrameSpec{0.4, 0.4, 0.0, 0.4}.validate()), Error);
  CHECK_THROWS_AS((FrameSpec{0.4, 0.1, 0.2, 0.2}.validate()), Error);
  CHECK_THROWS_AS((FrameSpec{0.4, 0.1, 0.0, 0.5}.validate()), Error);
  const auto w = FrameSpec::for_waveform(PumpWaveform{});
  CHECK(w.period == doctest::Approx(0.4));
  CHECK(w.latch_offset == doctest::Approx(0.1));
}

TEST_CASE("comparator latch") {
  const FrameSpec spec{0.2, 0.05, 0.0, 0.2};
  const double v_th = 0.7;
  const std::vector<double> above(1000, v_th + 1), below(1000, v_th - 1), equal(1000, v_th);
  CHECK(comparator_bits(above, 1e-3, spec, v_th) == BitStream(5, true));
  CHECK(comparator_bits(below, 1e-3, spec, v_th) == BitStream(5, false));
  CHECK(comparator_bits(equal, 1e-3, spec, v_th) == BitStream(5, true));
  CHECK(code_of([&] { comparator_bits(std::vector<double>(150, 1.0), 1e-3, spec, v_th); }) ==
        ErrorCode::invalid_argument);

  std::vector<double> trace(400, 0.0);
  trace[50] = 1.0;   // frame 0 latch
  trace[350] = 1.0;  // frame 1 latch is sample 250
  CHECK(comparator_bits(trace, 1e-3, spec, 0.5).to_string() == "10");
}

TEST_CASE("frame energies") {
  const FrameSpec spec{0.2, 0.05, 0.0, 0.2};
  const std::vector<double> px(200, 2.0), zeros(200, 0.0);
  const auto e = frame_energies(px, zeros, 1e-3, spec);
  REQUIRE(e.size() == 1);
  CHECK(e[0].ex == doctest::Approx(0.4));
  CHECK(e[0].ey == 0.0);
  const auto same = frame_energies(px, px, 1e-3, spec);
  CHECK(same[0].ex == same[0].ey);
  CHECK(code_of([&] { frame_energies(px, std::vector<double>(10), 1e-3, spec); }) == ErrorCode::length_mismatch);
  const FrameSpec narrow{0.2, 0.05, 0.1001, 0.1005};
  CHECK(code_of([&] { frame_energies(px, px, 1e-3, narrow); }) == ErrorCode::invalid_argument);
}

TEST_CASE("half-open windows tile the record") {
  const FrameSpec spec{0.4, 0.1, 0.0, 0.4};
  std::int64_t prev_end = 0;
  for (std::int64_t f = 0; f < 1000; ++f) {
    const auto [a, b] = window_samples(spec, 1e-3, f);
    REQUIRE(a == prev_end);
    REQUIRE(b - a == 400);
    prev_end = b;
  }
  const FrameSpec odd{1.0 / 7.0, 0.03, 0.0, 1.0 / 7.0};
  prev_end = 0;
  for (std::int64_t f = 0; f < 1000; ++f) {
    const auto [a, b] = window_samples(odd, 1e-3, f);
    REQUIRE(a == prev_end);
    REQUIRE((b - a == 142 || b - a == 143));
    prev_end = b;
  }
}

TEST_CASE("normalized S_x") {
  CHECK(normalized_sx(2.0, 2.0) == 0.5);
  CHECK(normalized_sx(1.0, 0.0) == 1.0);
  CHECK(normalized_sx(1.0, 3.0) == 0.25);
  CHECK(code_of([] { normalized_sx(0.0, 0.0); }) == ErrorCode::degenerate_frame);
  CHECK(code_of([] { normalized_sx(-1.0, 2.0); }) == ErrorCode::invalid_argument);

  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = u(gen), b = u(gen);
    const double s = normalized_sx(a, b);
    REQUIRE((s >= 0.0 && s <= 1.0));
    REQUIRE(s + normalized_sx(b, a) == 1.0);
  }
}

TEST_CASE("energy bits") {
  const std::vector<double> sx{0.9, 0.1, 0.5};
  CHECK(energy_bits(sx).to_string() == "101");
  CHECK(energy_bits(std::vector<double>(4, 0.0)).to_string() == "0000");
  CHECK(energy_bits(sx, 0.0).to_string() == "111");
}

TEST_CASE("digitization is scale invariant and skips degenerate frames") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<FrameEnergy> e;
  for (int i = 0; i < 500; ++i) e.push_back({u(gen), u(gen)});
  e[17] = {0.0, 0.0};
  const auto base = digitize_energies(e);
  CHECK(base.degenerate == 1);
  CHECK(base.records.size() == 499);
  CHECK(base.records[17].frame == 18);
  for (double c : {1e-6, 0.5, 3.0, 1e5}) {
    std::vector<FrameEnergy> scaled = e;
    for (auto& f : scaled) f = {f.ex * c, f.ey * c};
    const auto d = digitize_energies(scaled);
    REQUIRE(d.bits() == base.bits());
    for (std::size_t i = 0; i < d.records.size(); ++i) REQUIRE(d.records[i].sx == doctest::Approx(base.records[i].sx).epsilon(1e-14));
  }
}
