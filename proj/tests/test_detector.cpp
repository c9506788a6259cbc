#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <random>
#include <tuple>

#include "vqrng/detector.hpp"
#include "vqrng/error.hpp"

using namespace vqrng;

namespace {

// Independent evaluation of |sum_j h_j exp(-2 pi i f j dt)|.
double dft_magnitude(const std::vector<double>& taps, double f, double dt) {
  std::complex<double> acc = 0.0;
  for (std::size_t j = 0; j < taps.size(); ++j)
    acc += taps[j] * std::polar(1.0, -2.0 * std::numbers::pi * f * static_cast<double>(j) * dt);
  return std::abs(acc);
}

}  // namespace

TEST_CASE("low-pass design invariants") {
  for (const auto& [bw, dt, taps] : {std::tuple{30.0, 1e-3, std::size_t{101}}, std::tuple{10.0, 1e-3, std::size_t{201}},
                                     std::tuple{100.0, 2e-3, std::size_t{21}}, std::tuple{30.0, 5e-4, std::size_t{201}}}) {
    const auto k = design_lowpass(bw, dt, taps);
    REQUIRE(k.taps.size() == taps);
    CHECK(std::abs(std::accumulate(k.taps.begin(), k.taps.end(), 0.0) - 1.0) < 1e-9);
    for (std::size_t i = 0; i < taps; ++i) REQUIRE(k.taps[i] == k.taps[taps - 1 - i]);
    CHECK(magnitude_response(k, bw) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
  }
}

TEST_CASE("30 GHz kernel attenuates 60 GHz (DFT oracle)") {
  const auto k = design_lowpass(30.0, 1e-3, 101);
  CHECK(dft_magnitude(k.taps, 60.0, 1e-3) < 0.1);
  CHECK(dft_magnitude(k.taps, 30.0, 1e-3) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
  CHECK(dft_magnitude(k.taps, 0.0, 1e-3) == doctest::Approx(1.0).epsilon(1e-12));
  for (double f : {5.0, 17.0, 45.0, 120.0}) CHECK(magnitude_response(k, f) == doctest::Approx(dft_magnitude(k.taps, f, 1e-3)));
}

TEST_CASE("design errors") {
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io;
  };
  CHECK(code([] { design_lowpass(500.0, 1e-3, 101); }) == ErrorCode::filter_design);
  CHECK(code([] { design_lowpass(600.0, 1e-3, 101); }) == ErrorCode::filter_design);
  CHECK(code([] { design_lowpass(30.0, 1e-3, 100); }) == ErrorCode::filter_design);
  CHECK(code([] { design_lowpass(30.0, 1e-3, 9); }) == ErrorCode::filter_design);
  CHECK(code([] { design_lowpass(5.0, 1e-3, 11); }) == ErrorCode::filter_design);
}

TEST_CASE("filtering: DC gain, linearity, impulse response, shift covariance") {
  const auto k = design_lowpass(30.0, 1e-3, 101);
  const std::vector<double> flat(500, 3.25);
  for (double v : apply_filter(flat, 1e-3, k)) REQUIRE(std::abs(v - 3.25) < 1e-9);

  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  std::vector<double> a(400), b(400), sum(400);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = nd(gen);
    b[i] = nd(gen);
    sum[i] = a[i] + b[i];
  }
  const auto fa = apply_filter(a, 1e-3, k), fb = apply_filter(b, 1e-3, k), fs = apply_filter(sum, 1e-3, k);
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(std::abs(fs[i] - fa[i] - fb[i]) < 1e-9);

  std::vector<double> impulse(301, 0.0);
  impulse[150] = 1.0;
  const auto response = apply_filter(impulse, 1e-3, k);
  for (std::size_t j = 0; j < 101; ++j) REQUIRE(response[100 + j] == doctest::Approx(k.taps[j]));
  CHECK(response[99] == 0.0);
  CHECK(response[201] == 0.0);

  std::vector<double> shifted(a.size(), 0.0);
  for (std::size_t i = 7; i < a.size(); ++i) shifted[i] = a[i - 7];
  const auto fsh = apply_filter(shifted, 1e-3, k);
  for (std::size_t i = 60 + 7; i + 60 < a.size(); ++i) REQUIRE(std::abs(fsh[i] - fa[i - 7]) < 1e-12);

  CHECK_THROWS_AS(apply_filter(a, 2e-3, k), Error);
}

TEST_CASE("edge replication at the ends") {
  const auto k = design_lowpass(30.0, 1e-3, 61);
  std::vector<double> step(100, 1.0);
  for (std::size_t i = 50; i < 100; ++i) step[i] = 2.0;
  const auto out = apply_filter(step, 1e-3, k);
  CHECK(std::abs(out.front() - 1.0) < 1e-12);
  CHECK(std::abs(out.back() - 2.0) < 1e-12);
}

TEST_CASE("detector noise") {
  const std::vector<double> zeros(1000000, 0.0);
  SUBCASE("zero sigma is the identity") {
    const std::vector<double> x{1.0, 2.0, 3.0};
    CHECK(add_noise(x, 0.0, 5) == x);
  }
  SUBCASE("Gaussian moments") {
    const auto y = add_noise(zeros, 1.0, 17);
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(y.size() - 1));
    CHECK(std::abs(mean) < 0.004);
    CHECK(sd >= 0.995);
    CHECK(sd <= 1.005);
  }
  SUBCASE("determinism, seeds and chunking") {
    const std::vector<double> x(1001, 0.5);
    const auto a = add_noise(x, 0.3, 9);
    CHECK(a == add_noise(x, 0.3, 9));
    CHECK(a != add_noise(x, 0.3, 10));
    auto first = add_noise(std::span(x).first(333), 0.3, 9, 0);
    const auto second = add_noise(std::span(x).subspan(333), 0.3, 9, 333);
    first.insert(first.end(), second.begin(), second.end());
    CHECK(first == a);
  }
  CHECK_THROWS_AS(add_noise(zeros, -1.0, 1), Error);
}

TEST_CASE("detect filters first, then adds noise") {
  const auto k = design_lowpass(30.0, 1e-3, 101);
  std::vector<double> pulse(600, 0.0);
  for (std::size_t i = 250; i < 300; ++i) pulse[i] = 1.0;
  const auto out = detect(pulse, 1e-3, k, 0.1, 4);
  CHECK(out == add_noise(apply_filter(pulse, 1e-3, k), 0.1, 4));
  CHECK(out != apply_filter(add_noise(pulse, 0.1, 4), 1e-3, k));
}

TEST_CASE("noise calibration") {
  CHECK(calibrate_sigma_abs(0.05, 2.0, 1e-3, 400) == doctest::Approx(0.05 * 2.0 / (1e-3 * 20.0)));
  CHECK(calibrate_sigma_abs(0.0, 2.0, 1e-3, 400) == 0.0);
}
