#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "vqrng/bitstream.hpp"
#include "vqrng/entropy.hpp"

namespace vqrng {

struct WordStream {
  unsigned k = 8;
  std::vector<std::uint32_t> words;

  std::uint32_t mask() const noexcept { return k == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << k) - 1; }
  friend bool operator==(const WordStream&, const WordStream&) = default;
};

struct GroupedWords {
  WordStream words;
  std::size_t dropped_bits = 0;
};

/// Consecutive k-bit blocks, first bit most significant. 1 <= k <= 32.
GroupedWords group_words(const BitStream& bits, unsigned k);

/// Inverse of group_words (MSB-first).
BitStream words_to_bits(const WordStream& words);

/// y[i] = (x[i] + 2 x[i-1] + x[i-2]) mod 2^k with zero history.
WordStream fir_whiten(const WordStream& x);
/// x[i] = (y[i] - 2 x[i-1] - x[i-2]) mod 2^k with zero history.
WordStream fir_unwhiten(const WordStream& y);

/// Non-overlapping pairs: 01 -> 0, 10 -> 1, 00 and 11 dropped.
BitStream von_neumann(const BitStream& bits);

/// m x n Toeplitz matrix over GF(2) with T[i][j] = seed[i - j + n - 1].
struct ToeplitzSpec {
  std::size_t m = 0;
  std::size_t n = 0;
  BitStream seed;

  bool element(std::size_t i, std::size_t j) const { return seed[i + n - 1 - j]; }
};

ToeplitzSpec build_toeplitz(std::size_t m, std::size_t n, BitStream seed);

/// T raw over GF(2); raw must hold exactly n bits.
BitStream toeplitz_extract(const ToeplitzSpec& spec, const BitStream& raw);

/// floor(n / gamma_tilde), at least 1. gamma_tilde < 1 is rejected.
std::size_t output_length(std::size_t n, double gamma_tilde);

struct SeedOutcome {
  BitStream seed;             // the first `needed` von Neumann output bits, or all of them on shortfall
  std::size_t shortfall = 0;  // seed bits still missing
  std::size_t raw_used = 0;   // raw bits consumed up to the last pair that produced a seed bit

  bool ok() const noexcept { return shortfall == 0; }
};

SeedOutcome bootstrap_seed(const BitStream& raw, std::size_t needed);

struct ExtractionOptions {
  std::size_t block_n = 4096;
  unsigned k = 8;
  bool fir = true;
};

struct ExtractionResult {
  BitStream output;
  BitStream seed;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t blocks = 0;
  std::size_t seed_raw_bits = 0;  // head of the raw stream spent on the seed
  std::size_t dropped_word_bits = 0;
  std::size_t dropped_block_bits = 0;
};

/// Full chain. The seed is bootstrapped from the head of `raw` (the buffer
/// grows until von Neumann yields enough bits); the rest is grouped, FIR
/// whitened, cut into blocks of block_n and hashed with m = output_length.
ExtractionResult extract_pipeline(const BitStream& raw, const EntropyReport& report, const ExtractionOptions& opts);

/// Same chain with a caller-supplied seed of m + n - 1 bits; all of `raw` is
/// hashed.
ExtractionResult extract_pipeline(const BitStream& raw, const EntropyReport& report, const ExtractionOptions& opts,
                                  const BitStream& seed);

}  // namespace vqrng
