#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace vqrng::rng {

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t value) noexcept { return splitmix64(value); }

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A 128-bit
/// counter and 64-bit key map to 128 output bits; no state is carried, so any
/// (key, counter) can be evaluated independently and in any order.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;

  explicit constexpr Philox4x32(std::uint64_t key) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  constexpr Counter operator()(Counter ctr) const noexcept {
    std::array<std::uint32_t, 2> k = key_;
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, k);
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    return ctr;
  }

  /// Four uniforms in (0, 1) drawn from the block at the given 128-bit counter.
  std::array<double, 4> uniforms(std::uint64_t hi, std::uint64_t lo) const noexcept {
    const Counter a = (*this)(Counter{static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(lo >> 32),
                                      static_cast<std::uint32_t>(hi), static_cast<std::uint32_t>(hi >> 32)});
    const Counter b = (*this)(Counter{static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(lo >> 32),
                                      static_cast<std::uint32_t>(hi), static_cast<std::uint32_t>(hi >> 32) ^ 0x80000000u});
    auto to_unit = [](std::uint32_t h, std::uint32_t l) {
      const std::uint64_t bits = (static_cast<std::uint64_t>(h) << 32 | l) >> 11;
      return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    };
    return {to_unit(a[0], a[1]), to_unit(a[2], a[3]), to_unit(b[0], b[1]), to_unit(b[2], b[3])};
  }

  /// Four independent standard normals via Box-Muller on `uniforms(hi, lo)`.
  std::array<double, 4> normals(std::uint64_t hi, std::uint64_t lo) const noexcept {
    const auto u = uniforms(hi, lo);
    const double r0 = std::sqrt(-2.0 * std::log(u[0]));
    const double r1 = std::sqrt(-2.0 * std::log(u[2]));
    const double t0 = 2.0 * std::numbers::pi * u[1];
    const double t1 = 2.0 * std::numbers::pi * u[3];
    return {r0 * std::cos(t0), r0 * std::sin(t0), r1 * std::cos(t1), r1 * std::sin(t1)};
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter single_round(const Counter& c, const std::array<std::uint32_t, 2>& k) noexcept {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }

  std::array<std::uint32_t, 2> key_;
};

}  // namespace vqrng::rng
