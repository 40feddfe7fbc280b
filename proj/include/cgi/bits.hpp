#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace cgi {

/// Number of bits needed to write every value in [0, max_value]. At least 1.
constexpr unsigned bits_for(std::uint64_t max_value) {
  return max_value == 0 ? 1u : static_cast<unsigned>(std::bit_width(max_value));
}

/// ceil(log2(x)) for x >= 1.
constexpr unsigned ceil_log2(std::uint64_t x) {
  return x <= 1 ? 0u : static_cast<unsigned>(std::bit_width(x - 1));
}

/// Growable bit string with fixed-width integer fields, LSB-first within a
/// field. Used as the wire payload of simulator messages.
class BitString {
 public:
  BitString() = default;

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool bit(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }

  void push_bit(bool b) {
    if (size_ % 64 == 0) words_.push_back(0);
    if (b) words_[size_ / 64] |= std::uint64_t{1} << (size_ % 64);
    ++size_;
  }

  void append(std::uint64_t value, unsigned width) {
    for (unsigned i = 0; i < width; ++i) push_bit((value >> i) & 1u);
  }

  void append(const BitString& other) {
    for (std::size_t i = 0; i < other.size_; ++i) push_bit(other.bit(i));
  }

  std::uint64_t read(std::size_t pos, unsigned width) const {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i)
      if (bit(pos + i)) v |= std::uint64_t{1} << i;
    return v;
  }

  BitString slice(std::size_t pos, std::size_t len) const {
    BitString out;
    for (std::size_t i = 0; i < len; ++i) out.push_bit(bit(pos + i));
    return out;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) s.push_back(bit(i) ? '1' : '0');
    return s;
  }

  friend bool operator==(const BitString& a, const BitString& b) {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

/// Sequential field reader over a BitString.
class BitReader {
 public:
  explicit BitReader(const BitString& bits) : bits_(&bits) {}

  std::uint64_t take(unsigned width) {
    const std::uint64_t v = bits_->read(pos_, width);
    pos_ += width;
    return v;
  }
  std::size_t remaining() const { return bits_->size() - pos_; }

 private:
  const BitString* bits_;
  std::size_t pos_ = 0;
};

}  // namespace cgi
