#include "vqrng/frames.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "vqrng/error.hpp"

namespace vqrng {

void EngineOptions::validate() const { require(segment_frames >= 1, "segment_frames must be >= 1"); }

std::int64_t frame_first_sample(const PumpWaveform& waveform, double dt, std::int64_t frame) {
  return static_cast<std::int64_t>(std::ceil(static_cast<double>(frame) * waveform.period() / dt - 1e-9));
}

namespace {

struct Segment {
  std::int64_t first_frame;
  std::int64_t end_frame;
};

void run_segment(const VcselParams& laser, const PumpWaveform& pump, const SimGrid& grid, const FrameSpec& frames,
                 const FilterKernel& kernel, const EngineOptions& opts, const Segment& seg, std::int64_t global_end,
                 FrameSimulation& out) {
  const double dt = grid.dt;
  const auto c = static_cast<std::int64_t>(kernel.center());
  const std::int64_t start_frame = std::max<std::int64_t>(0, seg.first_frame - static_cast<std::int64_t>(opts.warmup_frames));
  const std::int64_t k_begin = frame_first_sample(pump, dt, start_frame);
  const std::int64_t k_end = std::min(global_end, frame_first_sample(pump, dt, seg.end_frame) + c);

  std::vector<double> px(static_cast<std::size_t>(k_end - k_begin));
  std::vector<double> py(px.size());
  const SfmStepper stepper(laser, dt, grid.rng_seed);
  SfmState s = resting_state(pump);
  std::int64_t k = k_begin;
  try {
    for (; k < k_end; ++k) {
      const auto [ex, ey] = to_linear_basis(s.e_plus, s.e_minus);
      const auto i = static_cast<std::size_t>(k - k_begin);
      px[i] = std::norm(ex);
      py[i] = std::norm(ey);
      if (k + 1 < k_end) stepper.step(s, pump_at(pump, static_cast<double>(k) * dt), k);
    }
  } catch (const Error& e) {
    const auto frame = static_cast<std::int64_t>(std::floor(static_cast<double>(k) * dt / pump.period()));
    throw Error(e.code(), "frame " + std::to_string(frame) + ": " + e.what());
  }

  const std::int64_t last = k_end - 1;
  for (std::int64_t f = seg.first_frame; f < seg.end_frame; ++f) {
    const auto slot = static_cast<std::size_t>(f);
    const auto [w0, w1] = window_samples(frames, dt, f);
    double ex = 0.0, ey = 0.0;
    for (std::int64_t k = w0; k < w1; ++k) {
      ex += px[static_cast<std::size_t>(k - k_begin)];
      ey += py[static_cast<std::size_t>(k - k_begin)];
    }
    out.energies[slot] = {ex * dt, ey * dt};

    const std::int64_t kl = std::min(latch_sample(frames, dt, f), global_end - 1);
    double acc = 0.0;
    for (std::size_t j = 0; j < kernel.taps.size(); ++j) {
      // Edge replication only ever triggers at the ends of the whole run.
      const std::int64_t src = std::clamp<std::int64_t>(kl + c - static_cast<std::int64_t>(j), 0, global_end - 1);
      acc += kernel.taps[j] * px[static_cast<std::size_t>(std::clamp(src, k_begin, last) - k_begin)];
    }
    out.latch[slot] = acc;
    out.latch_index[slot] = kl;
  }
}

}  // namespace

FrameSimulation simulate_frames(const VcselParams& laser, const PumpWaveform& pump, const SimGrid& grid,
                                const FrameSpec& frames, const FilterKernel& kernel, const EngineOptions& opts) {
  laser.validate();
  pump.validate();
  grid.validate(pump);
  frames.validate();
  opts.validate();
  require(std::abs(frames.period - pump.period()) <= 1e-9 * pump.period(), "frame period must equal 1 / rep_rate");
  require(std::abs(kernel.dt - grid.dt) <= 1e-12 * grid.dt, "filter kernel dt must equal the simulation dt");
  require(!kernel.taps.empty(), "filter kernel has no taps");

  const auto n_frames = static_cast<std::int64_t>(grid.n_frames);
  const std::int64_t global_end = frame_first_sample(pump, grid.dt, n_frames);

  FrameSimulation out;
  out.energies.resize(grid.n_frames);
  out.latch.resize(grid.n_frames);
  out.latch_index.resize(grid.n_frames);

  std::vector<Segment> segments;
  for (std::int64_t f = 0; f < n_frames; f += static_cast<std::int64_t>(opts.segment_frames))
    segments.push_back({f, std::min(n_frames, f + static_cast<std::int64_t>(opts.segment_frames))});

  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, segments.size()));
  std::vector<std::exception_ptr> errors(segments.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < segments.size();) {
      try {
        run_segment(laser, pump, grid, frames, kernel, opts, segments[i], global_end, out);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<double> noisy_latch(const FrameSimulation& sim, double sigma_abs, std::uint64_t noise_seed) {
  std::vector<double> out(sim.latch.size());
  for (std::size_t f = 0; f < out.size(); ++f)
    out[f] = add_noise(std::span(&sim.latch[f], 1), sigma_abs, noise_seed, static_cast<std::uint64_t>(sim.latch_index[f]))[0];
  return out;
}

double bimodal_midpoint(const std::vector<double>& values) {
  require(!values.empty(), "threshold of an empty sample");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double t = 0.5 * (*lo_it + *hi_it);
  for (int iter = 0; iter < 200; ++iter) {
    double s0 = 0, s1 = 0;
    std::size_t n0 = 0, n1 = 0;
    for (const double v : values) {
      if (v >= t) {
        s1 += v;
        ++n1;
      } else {
        s0 += v;
        ++n0;
      }
    }
    if (n0 == 0 || n1 == 0) break;
    const double next = 0.5 * (s0 / static_cast<double>(n0) + s1 / static_cast<double>(n1));
    if (next == t) break;
    t = next;
  }
  return t;
}

}  // namespace vqrng
