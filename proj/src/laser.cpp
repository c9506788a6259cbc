#include "vqrng/laser.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vqrng/error.hpp"
#include "vqrng/rng.hpp"

namespace vqrng {

void VcselParams::validate() const {
  require(std::isfinite(kappa) && kappa > 0, "kappa must be > 0");
  require(std::isfinite(alpha), "alpha must be finite");
  require(std::isfinite(gamma_n) && gamma_n > 0, "gamma_N must be > 0");
  require(std::isfinite(gamma_s) && gamma_s >= 0, "gamma_s must be >= 0");
  require(std::isfinite(gamma_a) && std::isfinite(gamma_p), "gamma_a and gamma_p must be finite");
  require(std::isfinite(beta_sp) && beta_sp >= 0, "beta_sp must be >= 0");
}

void PumpWaveform::validate() const {
  require(std::isfinite(rep_rate) && rep_rate > 0, "rep_rate must be > 0");
  require(duty > 0 && duty < 1, "duty must lie in (0, 1)");
  require(std::isfinite(mu_off) && std::isfinite(mu_on) && mu_off < mu_on, "pump levels must satisfy mu_off < mu_on");
}

double pump_at(const PumpWaveform& waveform, double t_ns) {
  require(t_ns >= 0, "pump time must be >= 0");
  const double period = waveform.period();
  const double phase = std::fmod(t_ns, period) / period;
  return phase < waveform.duty ? waveform.mu_on : waveform.mu_off;
}

void SimGrid::validate(const PumpWaveform& waveform) const {
  require(std::isfinite(dt) && dt > 0, "dt must be > 0");
  // 1e-9 slack so that e.g. 10 GHz with dt = 1 ps is accepted
  require(dt <= waveform.period() / 100.0 * (1 + 1e-9),
          "dt = " + std::to_string(dt) + " ns leaves fewer than 100 steps per pump period");
}

SfmState resting_state(const PumpWaveform& waveform) {
  SfmState s;
  s.carriers = waveform.mu_off;
  return s;
}

std::pair<Complex, Complex> to_linear_basis(Complex e_plus, Complex e_minus) noexcept {
  constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  const Complex ex = (e_plus + e_minus) * inv_sqrt2;
  const Complex ey = Complex(0.0, -1.0) * (e_plus - e_minus) * inv_sqrt2;
  return {ex, ey};
}

SfmStepper::SfmStepper(const VcselParams& params, double dt, std::uint64_t seed) : p_(params), dt_(dt), seed_(seed) {
  params.validate();
  require(std::isfinite(dt) && dt > 0, "dt must be > 0");
}

namespace {

// cosh(z) and sinh(z)/z; Taylor series near zero where the ratio is ill-conditioned.
void cosh_sinhc(Complex z, Complex& ch, Complex& shc) {
  if (std::abs(z) < 0.1) {
    const Complex z2 = z * z;
    ch = 1.0 + z2 * (1.0 / 2 + z2 * (1.0 / 24 + z2 * (1.0 / 720 + z2 / 40320.0)));
    shc = 1.0 + z2 * (1.0 / 6 + z2 * (1.0 / 120 + z2 * (1.0 / 5040 + z2 / 362880.0)));
    return;
  }
  const Complex ez = std::exp(z);
  const Complex inv = 1.0 / ez;
  ch = 0.5 * (ez + inv);
  shc = 0.5 * (ez - inv) / z;
}

// Exact solution of dX/dt = -a X + b over h for constant a >= 0, b.
double relax(double x, double a, double b, double h) {
  const double ah = a * h;
  const double phi = ah < 1e-8 ? h * (1.0 - 0.5 * ah) : -std::expm1(-ah) / a;
  return x * std::exp(-ah) + b * phi;
}

// Linear coefficients of the model frozen at one state. The field obeys
// dE/dt = (m I + [[d, c], [c, -d]]) E; carriers and spin obey dX/dt = -a X + b.
struct Generator {
  Complex m, d;
  double a_n, b_n, a_s, b_s;
};

Generator generator_at(const VcselParams& p, const SfmState& s, double mu) {
  const double total = s.total_power();
  const double imbalance = std::norm(s.e_plus) - std::norm(s.e_minus);
  const Complex gain_factor = p.kappa * Complex(1.0, p.alpha);
  return {gain_factor * (s.carriers - 1.0),
          gain_factor * s.spin,
          p.gamma_n * (1.0 + total),
          p.gamma_n * (mu - s.spin * imbalance),
          p.gamma_s + p.gamma_n * total,
          -p.gamma_n * s.carriers * imbalance};
}

Generator average(const Generator& x, const Generator& y) {
  return {0.5 * (x.m + y.m),     0.5 * (x.d + y.d),     0.5 * (x.a_n + y.a_n),
          0.5 * (x.b_n + y.b_n), 0.5 * (x.a_s + y.a_s), 0.5 * (x.b_s + y.b_s)};
}

SfmState propagate(const SfmState& s, const Generator& g, Complex c, double h, Complex noise_p, Complex noise_m) {
  const Complex root = std::sqrt(g.d * g.d + c * c);
  Complex ch, shc;
  cosh_sinhc(root * h, ch, shc);
  const Complex scale = std::exp(g.m * h);
  const Complex sh_h = shc * h;  // sinh(root h) / root
  SfmState out;
  out.e_plus = scale * ((ch + sh_h * g.d) * s.e_plus + sh_h * c * s.e_minus) + noise_p;
  out.e_minus = scale * (sh_h * c * s.e_plus + (ch - sh_h * g.d) * s.e_minus) + noise_m;
  out.carriers = relax(s.carriers, g.a_n, g.b_n, h);
  out.spin = relax(s.spin, g.a_s, g.b_s, h);
  return out;
}

}  // namespace

void SfmStepper::step(SfmState& s, double mu, std::int64_t k) const {
  const double h = dt_;
  const Complex c(-p_.gamma_a, -p_.gamma_p);

  Complex noise_p, noise_m;
  if (p_.beta_sp > 0) {
    const auto g = rng::Philox4x32(seed_).normals(0, static_cast<std::uint64_t>(k));
    const double base = p_.beta_sp * p_.gamma_n * h;
    noise_p = std::sqrt(base * std::max(s.carriers + s.spin, 0.0)) * Complex(g[0], g[1]);
    noise_m = std::sqrt(base * std::max(s.carriers - s.spin, 0.0)) * Complex(g[2], g[3]);
  }

  // Predictor with coefficients frozen at the start of the step, corrector
  // with coefficients averaged over both ends; the noise increment is shared.
  const Generator g0 = generator_at(p_, s, mu);
  const SfmState predicted = propagate(s, g0, c, h, noise_p, noise_m);
  s = propagate(s, average(g0, generator_at(p_, predicted, mu)), c, h, noise_p, noise_m);

  if (!std::isfinite(s.carriers) || !std::isfinite(s.spin) || !std::isfinite(s.total_power()))
    fail(ErrorCode::integration_diverged, "integration diverged at step " + std::to_string(k));
}

PolarizedTrace integrate_sfm(const VcselParams& params, const PumpFunction& pump, double dt, std::size_t steps,
                             std::uint64_t seed, const SfmState& initial,
                             const std::function<void(std::size_t, const SfmState&)>& observer) {
  const SfmStepper stepper(params, dt, seed);
  PolarizedTrace trace;
  trace.dt = dt;
  trace.px.resize(steps);
  trace.py.resize(steps);
  SfmState s = initial;
  for (std::size_t k = 0; k < steps; ++k) {
    const auto [ex, ey] = to_linear_basis(s.e_plus, s.e_minus);
    trace.px[k] = std::norm(ex);
    trace.py[k] = std::norm(ey);
    if (observer) observer(k, s);
    if (k + 1 < steps) stepper.step(s, pump(static_cast<double>(k) * dt), static_cast<std::int64_t>(k));
  }
  return trace;
}

std::size_t steps_for_frames(const PumpWaveform& waveform, double dt, std::uint64_t frames) {
  return static_cast<std::size_t>(std::ceil(static_cast<double>(frames) * waveform.period() / dt - 1e-9));
}

PolarizedTrace integrate_sfm(const VcselParams& params, const PumpWaveform& waveform, const SimGrid& grid) {
  return integrate_sfm(params, waveform, grid, resting_state(waveform));
}

PolarizedTrace integrate_sfm(const VcselParams& params, const PumpWaveform& waveform, const SimGrid& grid,
                             const SfmState& initial) {
  waveform.validate();
  grid.validate(waveform);
  const auto pump = [&waveform](double t) { return pump_at(waveform, t); };
  return integrate_sfm(params, pump, grid.dt, steps_for_frames(waveform, grid.dt, grid.n_frames), grid.rng_seed,
                       initial);
}

}  // namespace vqrng
