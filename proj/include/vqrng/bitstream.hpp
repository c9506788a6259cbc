#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vqrng {

/// Ordered bit sequence packed into 64-bit words. Bit `i` lives in word
/// `i / 64` at position `i % 64` (LSB-first); bits past `size()` in the last
/// word are always zero.
class BitStream {
 public:
  BitStream() = default;
  explicit BitStream(std::size_t count, bool value = false);
  BitStream(std::initializer_list<int> bits);

  /// Parses a string of '0'/'1' characters; anything else is rejected.
  static BitStream from_string(std::string_view text);
  /// Unpacked 0/1 bytes (any nonzero byte counts as 1).
  static BitStream from_bits(std::span<const std::uint8_t> bits);
  /// Packed bytes, LSB-first within each byte.
  static BitStream from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_count);

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool operator[](std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
  bool at(std::size_t i) const;
  void set(std::size_t i, bool value) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value) words_[i >> 6] |= mask; else words_[i >> 6] &= ~mask;
  }

  void push_back(bool value);
  void append(const BitStream& other);
  void reserve(std::size_t bits) { words_.reserve((bits + 63) / 64); }
  void clear() noexcept { words_.clear(); size_ = 0; }

  /// Copy of bits [first, first + count).
  BitStream slice(std::size_t first, std::size_t count) const;
  /// 64 bits starting at an arbitrary bit offset; bits past the end read as 0.
  std::uint64_t word_at(std::size_t bit_offset) const noexcept;

  std::size_t count_ones() const noexcept;

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::vector<std::uint8_t> to_bytes() const;
  std::string to_string() const;

  BitStream& operator^=(const BitStream& other);
  friend BitStream operator^(BitStream a, const BitStream& b) { return a ^= b; }
  friend bool operator==(const BitStream& a, const BitStream& b) noexcept {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

}  // namespace vqrng
