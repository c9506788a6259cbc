#include "vqrng/bitstream.hpp"

#include <bit>

#include "vqrng/error.hpp"

namespace vqrng {

BitStream::BitStream(std::size_t count, bool value)
    : words_((count + 63) / 64, value ? ~std::uint64_t{0} : 0), size_(count) {
  if (value && (count & 63)) words_.back() &= (std::uint64_t{1} << (count & 63)) - 1;
}

BitStream::BitStream(std::initializer_list<int> bits) {
  reserve(bits.size());
  for (int b : bits) push_back(b != 0);
}

BitStream BitStream::from_string(std::string_view text) {
  BitStream out;
  out.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') fail(ErrorCode::parse, std::string("invalid bit character '") + c + "'");
    out.push_back(c == '1');
  }
  return out;
}

BitStream BitStream::from_bits(std::span<const std::uint8_t> bits) {
  BitStream out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) out.set(i, true);
  return out;
}

BitStream BitStream::from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_count) {
  if (bit_count > bytes.size() * 8)
    fail(ErrorCode::length_mismatch, "bit count " + std::to_string(bit_count) + " exceeds " +
                                         std::to_string(bytes.size()) + " bytes");
  BitStream out(bit_count);
  for (std::size_t i = 0; i < (bit_count + 7) / 8; ++i)
    out.words_[i / 8] |= static_cast<std::uint64_t>(bytes[i]) << (8 * (i % 8));
  if (bit_count & 63) out.words_.back() &= (std::uint64_t{1} << (bit_count & 63)) - 1;
  return out;
}

bool BitStream::at(std::size_t i) const {
  if (i >= size_) fail(ErrorCode::invalid_argument, "bit index " + std::to_string(i) + " out of range");
  return (*this)[i];
}

void BitStream::push_back(bool value) {
  if ((size_ & 63) == 0) words_.push_back(0);
  if (value) words_.back() |= std::uint64_t{1} << (size_ & 63);
  ++size_;
}

void BitStream::append(const BitStream& other) {
  if ((size_ & 63) == 0) {
    words_.insert(words_.end(), other.words_.begin(), other.words_.end());
    size_ += other.size_;
    return;
  }
  reserve(size_ + other.size_);
  for (std::size_t i = 0; i < other.size_; ++i) push_back(other[i]);
}

std::uint64_t BitStream::word_at(std::size_t bit_offset) const noexcept {
  const std::size_t w = bit_offset >> 6;
  const unsigned shift = bit_offset & 63;
  if (w >= words_.size()) return 0;
  std::uint64_t lo = words_[w] >> shift;
  if (shift != 0 && w + 1 < words_.size()) lo |= words_[w + 1] << (64 - shift);
  return lo;
}

BitStream BitStream::slice(std::size_t first, std::size_t count) const {
  if (first > size_ || count > size_ - first)
    fail(ErrorCode::invalid_argument, "slice [" + std::to_string(first) + ", +" + std::to_string(count) +
                                          ") exceeds stream of " + std::to_string(size_) + " bits");
  BitStream out(count);
  for (std::size_t w = 0; w < out.words_.size(); ++w) out.words_[w] = word_at(first + 64 * w);
  if (count & 63) out.words_.back() &= (std::uint64_t{1} << (count & 63)) - 1;
  return out;
}

std::size_t BitStream::count_ones() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<std::uint8_t> BitStream::to_bytes() const {
  std::vector<std::uint8_t> out((size_ + 7) / 8);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8)));
  return out;
}

std::string BitStream::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i)
    if ((*this)[i]) s[i] = '1';
  return s;
}

BitStream& BitStream::operator^=(const BitStream& other) {
  if (other.size_ != size_)
    fail(ErrorCode::length_mismatch, "xor of streams with " + std::to_string(size_) + " and " +
                                         std::to_string(other.size_) + " bits");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

}  // namespace vqrng
