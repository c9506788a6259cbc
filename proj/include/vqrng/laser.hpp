#pragma once

// Spin-flip model (SFM) of a two-polarization VCSEL under gain switching.
//
// State: circular field components E+ and E- (normalized so that |E|^2 is
// photon number in units of the saturation level), total carrier inversion N
// and spin imbalance n, both normalized to threshold. Equations:
//
//   dE±/dt = kappa (1 + i alpha)(N ± n - 1) E± - (gamma_a + i gamma_p) E∓ + F±
//   dN/dt  = -gamma_N [ N (1 + |E+|^2 + |E-|^2) - mu(t) + n (|E+|^2 - |E-|^2) ]
//   dn/dt  = -gamma_s n - gamma_N [ n (|E+|^2 + |E-|^2) + N (|E+|^2 - |E-|^2) ]
//
// with Langevin forces F± of strength sqrt(beta_sp gamma_N (N ± n)).

#include <complex>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace vqrng {

using Complex = std::complex<double>;

// Defaults are tuned so that gain-switched pulses at 2.5-7 GHz select one
// linear polarization per pulse (U-shaped S_x) with no pulse-to-pulse memory.
struct VcselParams {
  double kappa = 300.0;    // field decay rate, 1/ns
  double alpha = 3.0;      // linewidth enhancement factor
  double gamma_n = 10.0;   // carrier decay rate, 1/ns
  double gamma_s = 3000.0; // spin-flip relaxation rate, 1/ns
  double gamma_a = 0.44;   // linear dichroism, 1/ns
  double gamma_p = 50.0;   // linear birefringence, rad/ns
  double beta_sp = 1e-5;   // spontaneous emission factor

  void validate() const;
  friend bool operator==(const VcselParams&, const VcselParams&) = default;
};

/// Square-wave pump: `mu_on` for the first `duty` fraction of every period.
struct PumpWaveform {
  double rep_rate = 2.5;  // GHz
  double duty = 0.5;
  double mu_off = 0.5;
  double mu_on = 15.0;

  double period() const noexcept { return 1.0 / rep_rate; }
  void validate() const;
  friend bool operator==(const PumpWaveform&, const PumpWaveform&) = default;
};

double pump_at(const PumpWaveform& waveform, double t_ns);

struct SimGrid {
  double dt = 1e-3;  // ns
  std::uint64_t n_frames = 100000;
  std::uint64_t rng_seed = 1;

  /// Throws unless dt > 0 and every pump period holds at least 100 steps.
  void validate(const PumpWaveform& waveform) const;
  friend bool operator==(const SimGrid&, const SimGrid&) = default;
};

struct SfmState {
  Complex e_plus{0.0, 0.0};
  Complex e_minus{0.0, 0.0};
  double carriers = 0.0;
  double spin = 0.0;

  double total_power() const noexcept { return std::norm(e_plus) + std::norm(e_minus); }
  friend bool operator==(const SfmState&, const SfmState&) = default;
};

/// Zero field, carriers at the pump-off level, no spin imbalance.
SfmState resting_state(const PumpWaveform& waveform);

/// (E+, E-) -> (Ex, Ey) with Ex = (E+ + E-)/sqrt2, Ey = -i (E+ - E-)/sqrt2.
std::pair<Complex, Complex> to_linear_basis(Complex e_plus, Complex e_minus) noexcept;

struct PolarizedTrace {
  double dt = 0.0;
  std::vector<double> px;
  std::vector<double> py;

  std::size_t size() const noexcept { return px.size(); }
};

/// One-step propagator: a stochastic exponential integrator. Within a step the
/// field obeys a linear 2x2 system and carriers/spin a linear relaxation, each
/// solved exactly with coefficients frozen first at the start of the step
/// (predictor) and then averaged over both ends (corrector). The Langevin
/// increment is drawn once per step with sqrt(dt) scaling, Euler-Maruyama
/// style, and is keyed by (seed, k) alone, so any stretch of steps can be
/// integrated independently and reproducibly. Fixed points of the
/// deterministic map coincide with the exact steady states of the model.
class SfmStepper {
 public:
  SfmStepper(const VcselParams& params, double dt, std::uint64_t seed);

  /// Advances `state` from t = k dt to (k + 1) dt under constant pump `mu`.
  /// Throws ErrorCode::integration_diverged if the new state is not finite.
  void step(SfmState& state, double mu, std::int64_t k) const;

  double dt() const noexcept { return dt_; }

 private:
  VcselParams p_;
  double dt_;
  std::uint64_t seed_;
};

using PumpFunction = std::function<double(double t_ns)>;

/// Integrates `steps` samples from t = 0; sample k is the state at k dt.
/// `observer(k, state)` is called for every sample if provided.
PolarizedTrace integrate_sfm(const VcselParams& params, const PumpFunction& pump, double dt, std::size_t steps,
                             std::uint64_t seed, const SfmState& initial,
                             const std::function<void(std::size_t, const SfmState&)>& observer = {});

/// Gain-switched run over `grid.n_frames` pump periods starting from
/// `initial` (defaults to `resting_state(waveform)`).
PolarizedTrace integrate_sfm(const VcselParams& params, const PumpWaveform& waveform, const SimGrid& grid);
PolarizedTrace integrate_sfm(const VcselParams& params, const PumpWaveform& waveform, const SimGrid& grid,
                             const SfmState& initial);

/// Number of samples k with k dt < frames * period (boundary samples belong to
/// the next frame).
std::size_t steps_for_frames(const PumpWaveform& waveform, double dt, std::uint64_t frames);

}  // namespace vqrng
