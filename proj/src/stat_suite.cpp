#include "vqrng/stat_suite.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <string>

#include "vqrng/error.hpp"
#include "vqrng/special.hpp"

namespace vqrng::nist {
namespace {

void need_length(const BitStream& bits, std::size_t min_length, const char* test) {
  if (bits.size() < min_length)
    fail(ErrorCode::invalid_argument, std::string(test) + " needs at least " + std::to_string(min_length) +
                                          " bits, got " + std::to_string(bits.size()));
}

TestResult make(const char* name, double statistic, double p, double alpha) {
  p = std::clamp(p, 0.0, 1.0);
  return {name, statistic, p, p >= alpha};
}

unsigned floor_log2(std::size_t n) { return n == 0 ? 0 : static_cast<unsigned>(std::bit_width(n) - 1); }

// Counts of every overlapping m-bit pattern with wrap-around.
std::vector<std::uint64_t> pattern_counts(const BitStream& bits, unsigned m) {
  std::vector<std::uint64_t> counts(std::size_t{1} << m, 0);
  if (m == 0) return counts;
  const std::size_t n = bits.size();
  const std::uint32_t mask = (std::uint32_t{1} << m) - 1;
  std::uint32_t window = 0;
  for (unsigned j = 0; j + 1 < m; ++j) window = (window << 1) | bits[j];
  for (std::size_t i = 0; i < n; ++i) {
    window = ((window << 1) | bits[(i + m - 1) % n]) & mask;
    ++counts[window];
  }
  return counts;
}

}  // namespace

TestResult monobit(const BitStream& bits, double alpha, std::size_t min_length) {
  need_length(bits, std::max<std::size_t>(min_length, 1), "monobit");
  const auto n = static_cast<double>(bits.size());
  const double sum = 2.0 * static_cast<double>(bits.count_ones()) - n;
  const double s_obs = std::abs(sum) / std::sqrt(n);
  return make("monobit", s_obs, std::erfc(s_obs / std::numbers::sqrt2), alpha);
}

TestResult block_frequency(const BitStream& bits, std::size_t block_m, double alpha) {
  require(block_m >= 2, "block frequency needs M >= 2");
  need_length(bits, std::max<std::size_t>(100, block_m), "block_frequency");
  const std::size_t blocks = bits.size() / block_m;
  double chi2 = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    std::size_t ones = 0;
    for (std::size_t j = 0; j < block_m; ++j) ones += bits[b * block_m + j];
    const double pi = static_cast<double>(ones) / static_cast<double>(block_m) - 0.5;
    chi2 += pi * pi;
  }
  chi2 *= 4.0 * static_cast<double>(block_m);
  return make("block_frequency", chi2, special::igamc(static_cast<double>(blocks) / 2.0, chi2 / 2.0), alpha);
}

TestResult runs(const BitStream& bits, double alpha) {
  need_length(bits, 100, "runs");
  const auto n = static_cast<double>(bits.size());
  const double pi = static_cast<double>(bits.count_ones()) / n;
  if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) return make("runs", 0.0, 0.0, alpha);
  std::size_t v = 1;
  for (std::size_t k = 0; k + 1 < bits.size(); ++k) v += bits[k] != bits[k + 1];
  const double vn = static_cast<double>(v);
  const double p = std::erfc(std::abs(vn - 2.0 * n * pi * (1.0 - pi)) / (2.0 * std::sqrt(2.0 * n) * pi * (1.0 - pi)));
  return make("runs", vn, p, alpha);
}

TestResult longest_run(const BitStream& bits, double alpha) {
  need_length(bits, 128, "longest_run");
  struct Table {
    std::size_t m;
    std::size_t v_min;
    std::vector<double> pi;
  };
  static const Table small{8, 1, {0.21484375, 0.3671875, 0.23046875, 0.1875}};
  static const Table medium{128, 4, {0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124}};
  static const Table large{10000, 10, {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727}};
  const Table& t = bits.size() < 6272 ? small : bits.size() < 750000 ? medium : large;

  const std::size_t blocks = bits.size() / t.m;
  const std::size_t classes = t.pi.size();
  std::vector<double> v(classes, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    std::size_t run = 0, longest = 0;
    for (std::size_t j = 0; j < t.m; ++j) {
      run = bits[b * t.m + j] ? run + 1 : 0;
      longest = std::max(longest, run);
    }
    const std::size_t cls = std::clamp(longest, t.v_min, t.v_min + classes - 1) - t.v_min;
    v[cls] += 1.0;
  }
  double chi2 = 0.0;
  const auto nb = static_cast<double>(blocks);
  for (std::size_t i = 0; i < classes; ++i) chi2 += (v[i] - nb * t.pi[i]) * (v[i] - nb * t.pi[i]) / (nb * t.pi[i]);
  return make("longest_run", chi2, special::igamc(static_cast<double>(classes - 1) / 2.0, chi2 / 2.0), alpha);
}

TestResult cumulative_sums(const BitStream& bits, Direction direction, double alpha) {
  need_length(bits, 100, "cumulative_sums");
  const std::size_t size = bits.size();
  std::int64_t s = 0, z = 0;
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t k = direction == Direction::forward ? i : size - 1 - i;
    s += bits[k] ? 1 : -1;
    z = std::max<std::int64_t>(z, std::abs(s));
  }
  const char* name = direction == Direction::forward ? "cumulative_sums_forward" : "cumulative_sums_backward";
  const auto n = static_cast<std::int64_t>(size);
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double zd = static_cast<double>(z);
  if (z == 0) return make(name, 0.0, 1.0, alpha);
  // Summation bounds use truncating integer division.
  double sum1 = 0.0;
  for (std::int64_t k = (-n / z + 1) / 4; k <= (n / z - 1) / 4; ++k)
    sum1 += special::normal_cdf(static_cast<double>(4 * k + 1) * zd / sqrt_n) -
            special::normal_cdf(static_cast<double>(4 * k - 1) * zd / sqrt_n);
  double sum2 = 0.0;
  for (std::int64_t k = (-n / z - 3) / 4; k <= (n / z - 1) / 4; ++k)
    sum2 += special::normal_cdf(static_cast<double>(4 * k + 3) * zd / sqrt_n) -
            special::normal_cdf(static_cast<double>(4 * k + 1) * zd / sqrt_n);
  return make(name, zd, 1.0 - sum1 + sum2, alpha);
}

TestResult approximate_entropy(const BitStream& bits, unsigned m, double alpha) {
  require(m >= 1 && m <= 20, "approximate entropy block length must lie in [1, 20]");
  need_length(bits, 100, "approximate_entropy");
  if (static_cast<int>(m) >= static_cast<int>(floor_log2(bits.size())) - 5)
    fail(ErrorCode::invalid_argument, "approximate entropy with m = " + std::to_string(m) + " needs m < floor(log2 n) - 5");
  const auto n = static_cast<double>(bits.size());
  auto phi = [&](unsigned len) {
    double acc = 0.0;
    for (const auto c : pattern_counts(bits, len))
      if (c > 0) {
        const double p = static_cast<double>(c) / n;
        acc += p * std::log(p);
      }
    return acc;
  };
  const double apen = phi(m) - phi(m + 1);
  const double chi2 = 2.0 * n * (std::numbers::ln2 - apen);
  return make("approximate_entropy", chi2, special::igamc(std::ldexp(1.0, static_cast<int>(m) - 1), chi2 / 2.0), alpha);
}

std::pair<TestResult, TestResult> serial(const BitStream& bits, unsigned m, double alpha) {
  require(m >= 2 && m <= 20, "serial block length must lie in [2, 20]");
  need_length(bits, 100, "serial");
  if (static_cast<int>(m) >= static_cast<int>(floor_log2(bits.size())) - 2)
    fail(ErrorCode::invalid_argument, "serial with m = " + std::to_string(m) + " needs m < floor(log2 n) - 2");
  const auto n = static_cast<double>(bits.size());
  auto psi2 = [&](unsigned len) {
    if (len == 0) return 0.0;
    double acc = 0.0;
    for (const auto c : pattern_counts(bits, len)) acc += static_cast<double>(c) * static_cast<double>(c);
    return std::ldexp(1.0, static_cast<int>(len)) / n * acc - n;
  };
  const double pm = psi2(m), pm1 = psi2(m - 1), pm2 = psi2(m - 2);
  const double del1 = pm - pm1;
  const double del2 = pm - 2.0 * pm1 + pm2;
  return {make("serial_1", del1, special::igamc(std::ldexp(1.0, static_cast<int>(m) - 2), del1 / 2.0), alpha),
          make("serial_2", del2, special::igamc(std::ldexp(1.0, static_cast<int>(m) - 3), del2 / 2.0), alpha)};
}

namespace {
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

TestResult dft_spectral(const BitStream& bits, double alpha) {
  need_length(bits, 1000, "dft");
  const std::size_t n = bits.size();
  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < n; ++i) in[i] = bits[i] ? 1.0 : -1.0;
  fftw_execute(plan);
  const double nd = static_cast<double>(n);
  const double threshold = std::sqrt(std::log(1.0 / 0.05) * nd);
  std::size_t below = 0;
  for (std::size_t j = 0; j < n / 2; ++j) below += std::hypot(out[j][0], out[j][1]) < threshold;
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(out);
  fftw_free(in);
  const double n0 = 0.95 * nd / 2.0;
  const double d = (static_cast<double>(below) - n0) / std::sqrt(nd * 0.95 * 0.05 / 4.0);
  return make("dft", d, std::erfc(std::abs(d) / std::numbers::sqrt2), alpha);
}

const char* test_name(TestId id) noexcept {
  switch (id) {
    case TestId::monobit: return "monobit";
    case TestId::block_frequency: return "block_frequency";
    case TestId::runs: return "runs";
    case TestId::longest_run: return "longest_run";
    case TestId::cumulative_sums: return "cumulative_sums";
    case TestId::approximate_entropy: return "approximate_entropy";
    case TestId::serial: return "serial";
    case TestId::dft: return "dft";
  }
  return "unknown";
}

std::optional<TestId> parse_test_name(const std::string& name) {
  for (const auto id : kAllTests)
    if (name == test_name(id)) return id;
  return std::nullopt;
}

namespace {

std::vector<std::string> row_names(TestId id) {
  switch (id) {
    case TestId::cumulative_sums: return {"cumulative_sums_forward", "cumulative_sums_backward"};
    case TestId::serial: return {"serial_1", "serial_2"};
    default: return {test_name(id)};
  }
}

}  // namespace

std::vector<TestOutcome> run_tests(const BitStream& bits, const SuiteOptions& opts) {
  std::vector<TestOutcome> rows;
  for (const auto id : opts.tests) {
    try {
      switch (id) {
        case TestId::monobit: rows.push_back({"monobit", monobit(bits, opts.alpha), {}}); break;
        case TestId::block_frequency:
          rows.push_back({"block_frequency", block_frequency(bits, opts.block_m, opts.alpha), {}});
          break;
        case TestId::runs: rows.push_back({"runs", runs(bits, opts.alpha), {}}); break;
        case TestId::longest_run: rows.push_back({"longest_run", longest_run(bits, opts.alpha), {}}); break;
        case TestId::cumulative_sums: {
          auto fwd = cumulative_sums(bits, Direction::forward, opts.alpha);
          auto bwd = cumulative_sums(bits, Direction::backward, opts.alpha);
          rows.push_back({fwd.name, fwd, {}});
          rows.push_back({bwd.name, bwd, {}});
          break;
        }
        case TestId::approximate_entropy:
          rows.push_back({"approximate_entropy", approximate_entropy(bits, opts.apen_m, opts.alpha), {}});
          break;
        case TestId::serial: {
          auto [a, b] = serial(bits, opts.serial_m, opts.alpha);
          rows.push_back({a.name, a, {}});
          rows.push_back({b.name, b, {}});
          break;
        }
        case TestId::dft: rows.push_back({"dft", dft_spectral(bits, opts.alpha), {}}); break;
      }
    } catch (const Error& e) {
      for (auto& name : row_names(id)) rows.push_back({std::move(name), std::nullopt, e.what()});
    }
  }
  return rows;
}

bool SuiteReport::all_passed() const noexcept {
  if (sequences.empty()) return false;
  for (const auto& seq : sequences)
    for (const auto& row : seq)
      if (!row.result || !row.result->passed) return false;
  return true;
}

SuiteReport run_suite(const std::vector<BitStream>& sequences, const SuiteOptions& opts) {
  require(opts.alpha > 0 && opts.alpha < 1, "alpha must lie in (0, 1)");
  SuiteReport report;
  report.alpha = opts.alpha;
  report.sequences.reserve(sequences.size());
  for (const auto& seq : sequences) report.sequences.push_back(run_tests(seq, opts));

  std::vector<std::string> order;
  for (const auto id : opts.tests)
    for (auto& name : row_names(id)) order.push_back(std::move(name));
  const auto s = static_cast<double>(sequences.size());
  for (const auto& name : order) {
    TestSummary t;
    t.name = name;
    t.sequences = sequences.size();
    std::array<std::size_t, 10> bins{};
    std::size_t valid = 0;
    for (const auto& seq : report.sequences)
      for (const auto& row : seq) {
        if (row.name != name) continue;
        if (!row.result) {
          ++t.errors;
          continue;
        }
        t.passes += row.result->passed;
        ++bins[std::min<std::size_t>(static_cast<std::size_t>(row.result->p_value * 10.0), 9)];
        ++valid;
      }
    if (t.sequences > 0) {
      t.pass_proportion = static_cast<double>(t.passes) / s;
      const double p_hat = 1.0 - opts.alpha;
      t.proportion_threshold = p_hat - 3.0 * std::sqrt(p_hat * (1.0 - p_hat) / s);
    }
    if (valid >= 10) {
      const double expected = static_cast<double>(valid) / 10.0;
      double chi2 = 0.0;
      for (const auto b : bins) chi2 += (static_cast<double>(b) - expected) * (static_cast<double>(b) - expected) / expected;
      t.uniformity_p = special::igamc(4.5, chi2 / 2.0);
    }
    report.summary.push_back(std::move(t));
  }
  return report;
}

}  // namespace vqrng::nist
