#include "doctest.h"

#include <array>
#include <cmath>
#include <random>

#include "vqrng/error.hpp"
#include "vqrng/laser.hpp"
#include "vqrng/rng.hpp"

using namespace vqrng;

namespace {

PumpWaveform constant_pump(double mu) {
  PumpWaveform w;
  w.mu_on = mu;
  w.mu_off = mu - 1.0;
  return w;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

// Model right-hand side written out directly from the rate equations.
struct Rhs {
  Complex dp, dm;
  double dn, ds;
};

Rhs rhs(const VcselParams& p, const SfmState& s, double mu) {
  const Complex g(p.kappa, p.kappa * p.alpha);
  const Complex lin(p.gamma_a, p.gamma_p);
  const double ip = std::norm(s.e_plus), im = std::norm(s.e_minus);
  return {g * (s.carriers + s.spin - 1.0) * s.e_plus - lin * s.e_minus,
          g * (s.carriers - s.spin - 1.0) * s.e_minus - lin * s.e_plus,
          -p.gamma_n * (s.carriers * (1.0 + ip + im) - mu + s.spin * (ip - im)),
          -p.gamma_s * s.spin - p.gamma_n * (s.spin * (ip + im) + s.carriers * (ip - im))};
}

}  // namespace

TEST_CASE("Philox4x32-10 known answer") {
  const rng::Philox4x32 zero(0);
  const auto out = zero({0, 0, 0, 0});
  CHECK(out == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  const rng::Philox4x32 pi(0x299f31d0a4093822ULL);
  const auto out2 = pi({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u});
  CHECK(out2 == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("pump waveform") {
  PumpWaveform w;
  w.duty = 0.5;
  CHECK(pump_at(w, 0.0) == w.mu_on);
  CHECK(pump_at(w, 0.75 * w.period()) == w.mu_off);
  for (double t : {0.013, 0.1, 0.21, 0.33})
    CHECK(pump_at(w, t) == pump_at(w, t + w.period()));
  CHECK_THROWS_AS(pump_at(w, -1.0), Error);
  PumpWaveform bad = w;
  bad.mu_on = bad.mu_off;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = w;
  bad.duty = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("grid needs 100 steps per period") {
  PumpWaveform w;
  w.rep_rate = 10.0;
  SimGrid g;
  g.dt = 1e-3;
  CHECK_NOTHROW(g.validate(w));
  g.dt = 1.01e-3;
  CHECK_THROWS_AS(g.validate(w), Error);
}

TEST_CASE("linear basis examples") {
  auto [ex, ey] = to_linear_basis(1.0, 1.0);
  CHECK(ex.real() == doctest::Approx(std::sqrt(2.0)));
  CHECK(std::abs(ey) == 0.0);
  std::tie(ex, ey) = to_linear_basis(1.0, -1.0);
  CHECK(std::abs(ex) == 0.0);
  CHECK(std::abs(ey) == doctest::Approx(std::sqrt(2.0)));
  std::tie(ex, ey) = to_linear_basis(1.0, 0.0);
  CHECK(std::norm(ex) == doctest::Approx(0.5));
  CHECK(std::norm(ey) == doctest::Approx(0.5));
}

TEST_CASE("total power is basis invariant") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 10000; ++i) {
    const double scale = std::pow(10.0, nd(gen) * 3);
    const Complex ep(scale * nd(gen), scale * nd(gen)), em(scale * nd(gen), scale * nd(gen));
    const auto [ex, ey] = to_linear_basis(ep, em);
    const double circ = std::norm(ep) + std::norm(em);
    CHECK(std::abs(std::norm(ex) + std::norm(ey) - circ) <= 1e-12 * circ);
  }
}

TEST_CASE("noise-off null field") {
  VcselParams p;
  p.beta_sp = 0.0;
  SUBCASE("pump below threshold") {
    PumpWaveform w;
    w.mu_off = 0.3;
    w.mu_on = 0.8;
    SimGrid g;
    g.n_frames = 20;
    const auto trace = integrate_sfm(p, w, g);
    for (std::size_t k = 0; k < trace.size(); ++k) {
      REQUIRE(trace.px[k] == 0.0);
      REQUIRE(trace.py[k] == 0.0);
    }
  }
  SUBCASE("pump above threshold") {
    SimGrid g;
    g.n_frames = 20;
    const auto trace = integrate_sfm(p, PumpWaveform{}, g);
    for (std::size_t k = 0; k < trace.size(); ++k) REQUIRE(trace.px[k] + trace.py[k] == 0.0);
  }
}

TEST_CASE("symmetric field without anisotropy stays x-polarized") {
  VcselParams p;
  p.gamma_a = 0.0;
  p.gamma_p = 0.0;
  p.beta_sp = 0.0;
  SfmState init = resting_state(PumpWaveform{});
  init.e_plus = init.e_minus = Complex(0.1, 0.05);
  SimGrid g;
  g.n_frames = 10;
  const auto trace = integrate_sfm(p, PumpWaveform{}, g, init);
  double peak = 0.0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    REQUIRE(trace.py[k] == 0.0);
    peak = std::max(peak, trace.px[k]);
  }
  CHECK(peak > 1.0);
}

TEST_CASE("powers are non-negative and runs are bit-identical") {
  SimGrid g;
  g.n_frames = 30;
  g.rng_seed = 99;
  const auto a = integrate_sfm(VcselParams{}, PumpWaveform{}, g);
  const auto b = integrate_sfm(VcselParams{}, PumpWaveform{}, g);
  CHECK(a.px == b.px);
  CHECK(a.py == b.py);
  for (std::size_t k = 0; k < a.size(); ++k) REQUIRE((a.px[k] >= 0.0 && a.py[k] >= 0.0));
  g.rng_seed = 100;
  CHECK(integrate_sfm(VcselParams{}, PumpWaveform{}, g).px != a.px);
}

TEST_CASE("integration from any step reproduces the same noise") {
  // Splitting a run at step K and resuming from the state reached there must
  // give the same samples as one pass.
  const VcselParams p;
  const PumpWaveform w;
  const SfmStepper stepper(p, 1e-3, 5);
  SfmState whole = resting_state(w), split = resting_state(w);
  for (std::int64_t k = 0; k < 800; ++k) stepper.step(whole, pump_at(w, k * 1e-3), k);
  for (std::int64_t k = 0; k < 300; ++k) stepper.step(split, pump_at(w, k * 1e-3), k);
  const SfmState middle = split;
  const SfmStepper other(p, 1e-3, 5);
  split = middle;
  for (std::int64_t k = 300; k < 800; ++k) other.step(split, pump_at(w, k * 1e-3), k);
  CHECK(split == whole);
}

TEST_CASE("non-finite state reports the step index") {
  const SfmStepper stepper(VcselParams{}, 1e-3, 1);
  SfmState s;
  s.carriers = std::nan("");
  try {
    stepper.step(s, 2.0, 17);
    FAIL("expected integration_diverged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::integration_diverged);
    CHECK(std::string(e.what()).find("step 17") != std::string::npos);
  }
}

TEST_CASE("deterministic steady state matches a root-finding oracle") {
  VcselParams p;
  p.beta_sp = 0.0;
  const double mu = 4.0;

  // Oracle: Newton iteration with a finite-difference Jacobian on the
  // residuals (d|E+|^2/dt, dN/dt) of a linearly polarized state E+ = -E- with
  // n = 0, evaluated through the raw right-hand side.
  auto residual = [&](const std::array<double, 2>& v) {
    SfmState s;
    s.carriers = v[0];
    s.e_plus = std::sqrt(v[1] / 2.0);
    s.e_minus = -s.e_plus;
    const Rhs r = rhs(p, s, mu);
    return std::array<double, 2>{2.0 * std::real(std::conj(s.e_plus) * r.dp) / v[1], r.dn};
  };
  std::array<double, 2> x{1.2, 1.0};
  for (int iter = 0; iter < 50; ++iter) {
    const auto f = residual(x);
    double jac[2][2];
    for (int j = 0; j < 2; ++j) {
      auto xh = x;
      const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
      xh[j] += h;
      const auto fh = residual(xh);
      for (int i = 0; i < 2; ++i) jac[i][j] = (fh[i] - f[i]) / h;
    }
    const double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    x[0] -= (jac[1][1] * f[0] - jac[0][1] * f[1]) / det;
    x[1] -= (-jac[1][0] * f[0] + jac[0][0] * f[1]) / det;
  }
  REQUIRE(std::abs(residual(x)[0]) < 1e-9);
  REQUIRE(std::abs(residual(x)[1]) < 1e-9);

  SfmState init;
  init.carriers = 1.0;
  init.e_plus = 0.3;
  init.e_minus = -0.3;
  const double dt = 1e-3;
  const std::size_t steps = 20000;
  SfmState last;
  integrate_sfm(p, [mu](double) { return mu; }, dt, steps, 1, init,
                [&](std::size_t, const SfmState& s) { last = s; });
  CHECK(rel_diff(last.carriers, x[0]) < 1e-3);
  CHECK(rel_diff(last.total_power(), x[1]) < 1e-3);
}

TEST_CASE("halving the step leaves the deterministic state unchanged to 1e-3") {
  VcselParams p;
  p.beta_sp = 0.0;
  SfmState init;
  init.carriers = 1.0;
  init.e_plus = Complex(1e-3, 0.0);
  init.e_minus = Complex(0.0, 2e-3);
  auto final_state = [&](double mu, double t_end, double dt) {
    const auto steps = static_cast<std::size_t>(std::llround(t_end / dt)) + 1;
    SfmState last;
    integrate_sfm(p, [mu](double) { return mu; }, dt, steps, 1, init,
                  [&](std::size_t, const SfmState& s) { last = s; });
    return last;
  };
  // Ends inside the damped relaxation oscillations, not at the fixed point.
  for (const auto& [mu, t_end] : {std::pair{4.0, 0.5}, std::pair{4.0, 1.0}, std::pair{15.0, 1.0}}) {
    CAPTURE(mu);
    CAPTURE(t_end);
    const SfmState coarse = final_state(mu, t_end, 1e-3);
    const SfmState fine = final_state(mu, t_end, 5e-4);
    CHECK(rel_diff(coarse.total_power(), fine.total_power()) < 1e-3);
    CHECK(rel_diff(coarse.carriers, fine.carriers) < 1e-3);
  }
}
