#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vqrng/bitstream.hpp"

namespace vqrng::nist {

struct TestResult {
  std::string name;
  double statistic = 0.0;
  double p_value = 0.0;
  bool passed = false;
};

// Each test throws ErrorCode::invalid_argument when the sequence is shorter
// than the test's minimum length.

TestResult monobit(const BitStream& bits, double alpha = 0.01, std::size_t min_length = 100);
TestResult block_frequency(const BitStream& bits, std::size_t block_m = 128, double alpha = 0.01);
TestResult runs(const BitStream& bits, double alpha = 0.01);
TestResult longest_run(const BitStream& bits, double alpha = 0.01);

enum class Direction { forward, backward };
TestResult cumulative_sums(const BitStream& bits, Direction direction, double alpha = 0.01);

TestResult approximate_entropy(const BitStream& bits, unsigned m = 2, double alpha = 0.01);
std::pair<TestResult, TestResult> serial(const BitStream& bits, unsigned m = 3, double alpha = 0.01);
TestResult dft_spectral(const BitStream& bits, double alpha = 0.01);

enum class TestId { monobit, block_frequency, runs, longest_run, cumulative_sums, approximate_entropy, serial, dft };

inline constexpr TestId kAllTests[] = {TestId::monobit,         TestId::block_frequency,     TestId::runs,
                                       TestId::longest_run,     TestId::cumulative_sums,     TestId::approximate_entropy,
                                       TestId::serial,          TestId::dft};

const char* test_name(TestId id) noexcept;
std::optional<TestId> parse_test_name(const std::string& name);

struct SuiteOptions {
  double alpha = 0.01;
  std::vector<TestId> tests{std::begin(kAllTests), std::end(kAllTests)};
  std::size_t block_m = 128;
  unsigned apen_m = 2;
  unsigned serial_m = 3;

  friend bool operator==(const SuiteOptions&, const SuiteOptions&) = default;
};

/// One row per reported statistic. Cumulative sums and serial contribute two
/// rows each. A test that could not run carries an error instead of a result.
struct TestOutcome {
  std::string name;
  std::optional<TestResult> result;
  std::string error;
};

struct TestSummary {
  std::string name;
  std::size_t sequences = 0;
  std::size_t passes = 0;
  std::size_t errors = 0;
  double pass_proportion = 0.0;          // passes / sequences
  double proportion_threshold = 0.0;     // (1 - alpha) - 3 sqrt(alpha (1 - alpha) / sequences)
  std::optional<double> uniformity_p;    // 10-bin chi-square of p-values, >= 10 sequences
};

struct SuiteReport {
  double alpha = 0.01;
  std::vector<std::vector<TestOutcome>> sequences;
  std::vector<TestSummary> summary;

  /// Every row of every sequence ran and passed.
  bool all_passed() const noexcept;
};

std::vector<TestOutcome> run_tests(const BitStream& bits, const SuiteOptions& opts);
SuiteReport run_suite(const std::vector<BitStream>& sequences, const SuiteOptions& opts = {});

}  // namespace vqrng::nist
