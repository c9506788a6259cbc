#include "vqrng/extractors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "vqrng/error.hpp"

namespace vqrng {

GroupedWords group_words(const BitStream& bits, unsigned k) {
  require(k >= 1 && k <= 32, "word width must lie in [1, 32]");
  GroupedWords out;
  out.words.k = k;
  const std::size_t count = bits.size() / k;
  out.words.words.resize(count);
  for (std::size_t w = 0; w < count; ++w) {
    std::uint32_t word = 0;
    for (unsigned b = 0; b < k; ++b) word = (word << 1) | static_cast<std::uint32_t>(bits[w * k + b]);
    out.words.words[w] = word;
  }
  out.dropped_bits = bits.size() - count * k;
  return out;
}

BitStream words_to_bits(const WordStream& words) {
  BitStream out(words.words.size() * words.k);
  std::size_t i = 0;
  for (const auto word : words.words)
    for (unsigned b = words.k; b-- > 0;) out.set(i++, (word >> b) & 1u);
  return out;
}

WordStream fir_whiten(const WordStream& x) {
  WordStream y{x.k, std::vector<std::uint32_t>(x.words.size())};
  const std::uint64_t mask = x.mask();
  std::uint64_t x1 = 0, x2 = 0;
  for (std::size_t i = 0; i < x.words.size(); ++i) {
    const std::uint64_t xi = x.words[i] & mask;
    y.words[i] = static_cast<std::uint32_t>((xi + 2 * x1 + x2) & mask);
    x2 = x1;
    x1 = xi;
  }
  return y;
}

WordStream fir_unwhiten(const WordStream& y) {
  WordStream x{y.k, std::vector<std::uint32_t>(y.words.size())};
  const std::uint64_t mask = y.mask();
  std::uint64_t x1 = 0, x2 = 0;
  for (std::size_t i = 0; i < y.words.size(); ++i) {
    // Unsigned wrap-around is exact modulo 2^64, hence modulo 2^k.
    const std::uint64_t xi = (static_cast<std::uint64_t>(y.words[i]) - 2 * x1 - x2) & mask;
    x.words[i] = static_cast<std::uint32_t>(xi);
    x2 = x1;
    x1 = xi;
  }
  return x;
}

BitStream von_neumann(const BitStream& bits) {
  BitStream out;
  out.reserve(bits.size() / 4);
  for (std::size_t i = 0; i + 1 < bits.size(); i += 2)
    if (bits[i] != bits[i + 1]) out.push_back(bits[i]);
  return out;
}

ToeplitzSpec build_toeplitz(std::size_t m, std::size_t n, BitStream seed) {
  require(m >= 1 && n >= m, "Toeplitz shape needs 1 <= m <= n");
  if (seed.size() != m + n - 1)
    fail(ErrorCode::length_mismatch, "Toeplitz seed has " + std::to_string(seed.size()) + " bits, expected m + n - 1 = " +
                                         std::to_string(m + n - 1));
  return {m, n, std::move(seed)};
}

BitStream toeplitz_extract(const ToeplitzSpec& spec, const BitStream& raw) {
  if (raw.size() != spec.n)
    fail(ErrorCode::length_mismatch, "raw block has " + std::to_string(raw.size()) + " bits, Toeplitz expects " +
                                         std::to_string(spec.n));
  // With t = n - 1 - j, out[i] = parity over t of seed[i + t] & raw[n - 1 - t].
  BitStream reversed(spec.n);
  for (std::size_t t = 0; t < spec.n; ++t) reversed.set(t, raw[spec.n - 1 - t]);
  const auto rev = reversed.words();
  BitStream out(spec.m);
  for (std::size_t i = 0; i < spec.m; ++i) {
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < rev.size(); ++w) acc ^= spec.seed.word_at(i + 64 * w) & rev[w];
    out.set(i, std::popcount(acc) & 1);
  }
  return out;
}

std::size_t output_length(std::size_t n, double gamma_tilde) {
  require(n >= 1, "block length must be >= 1");
  if (!(gamma_tilde >= 1.0))
    fail(ErrorCode::invalid_argument, "reduction factor " + std::to_string(gamma_tilde) + " < 1 would expand the output");
  const auto m = static_cast<std::size_t>(std::floor(static_cast<double>(n) / gamma_tilde));
  return std::max<std::size_t>(m, 1);
}

SeedOutcome bootstrap_seed(const BitStream& raw, std::size_t needed) {
  SeedOutcome out;
  out.seed.reserve(needed);
  for (std::size_t i = 0; i + 1 < raw.size() && out.seed.size() < needed; i += 2) {
    if (raw[i] != raw[i + 1]) {
      out.seed.push_back(raw[i]);
      out.raw_used = i + 2;
    }
  }
  out.shortfall = needed - out.seed.size();
  return out;
}

namespace {

ExtractionResult hash_blocks(const BitStream& raw, const EntropyReport& report, const ExtractionOptions& opts,
                             const BitStream* seed, std::size_t head) {
  require(opts.block_n >= 2, "block length must be >= 2");
  ExtractionResult r;
  r.n = opts.block_n;
  r.m = output_length(r.n, report.gamma_tilde);
  const std::size_t needed = r.m + r.n - 1;

  if (seed != nullptr) {
    r.seed = *seed;
  } else {
    // Buffer a short head of the raw stream and grow it until von Neumann
    // yields a full seed.
    std::size_t buffer = std::min(raw.size(), 4 * needed);
    SeedOutcome outcome = bootstrap_seed(raw.slice(0, buffer), needed);
    while (!outcome.ok() && buffer < raw.size()) {
      buffer = std::min(raw.size(), buffer + std::max<std::size_t>(4 * outcome.shortfall, 64));
      outcome = bootstrap_seed(raw.slice(0, buffer), needed);
    }
    if (!outcome.ok())
      fail(ErrorCode::insufficient_seed, "von Neumann bootstrap is " + std::to_string(outcome.shortfall) + " of " +
                                             std::to_string(needed) + " seed bits short after " +
                                             std::to_string(raw.size()) + " raw bits");
    r.seed = std::move(outcome.seed);
    head = outcome.raw_used;
  }
  r.seed_raw_bits = head;
  const ToeplitzSpec spec = build_toeplitz(r.m, r.n, r.seed);

  const auto grouped = group_words(raw.slice(head, raw.size() - head), opts.k);
  r.dropped_word_bits = grouped.dropped_bits;
  const BitStream filtered = words_to_bits(opts.fir ? fir_whiten(grouped.words) : grouped.words);
  r.blocks = filtered.size() / r.n;
  r.dropped_block_bits = filtered.size() - r.blocks * r.n;
  r.output.reserve(r.blocks * r.m);
  for (std::size_t b = 0; b < r.blocks; ++b) r.output.append(toeplitz_extract(spec, filtered.slice(b * r.n, r.n)));
  return r;
}

}  // namespace

ExtractionResult extract_pipeline(const BitStream& raw, const EntropyReport& report, const ExtractionOptions& opts) {
  return hash_blocks(raw, report, opts, nullptr, 0);
}

ExtractionResult extract_pipeline(const BitStream& raw, const EntropyReport& report, const ExtractionOptions& opts,
                                  const BitStream& seed) {
  return hash_blocks(raw, report, opts, &seed, 0);
}

}  // namespace vqrng
