#pragma once

#include <bit>
#include <cstdint>
#include <cstddef>
#include <utility>
#include <vector>

namespace rid {

/// Fixed-length bit vector used for sample supports and binary split columns.
/// Trailing bits of the last word are kept zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t n, bool value = false)
      : n_(n), words_((n + 63) / 64, value ? ~0ULL : 0ULL) {
    trim();
  }

  std::size_t size() const { return n_; }
  std::size_t word_count() const { return words_.size(); }
  const std::uint64_t* words() const { return words_.data(); }
  std::uint64_t* words() { return words_.data(); }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1ULL; }

  void set(std::size_t i, bool value) {
    const std::uint64_t mask = 1ULL << (i & 63);
    if (value)
      words_[i >> 6] |= mask;
    else
      words_[i >> 6] &= ~mask;
  }

  std::size_t count() const {
    std::size_t s = 0;
    for (std::uint64_t w : words_) s += static_cast<std::size_t>(std::popcount(w));
    return s;
  }

  bool any() const {
    for (std::uint64_t w : words_)
      if (w) return true;
    return false;
  }
  bool none() const { return !any(); }

  /// popcount(this AND other)
  std::size_t count_and(const BitVector& other) const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      s += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
    return s;
  }

  /// popcount(this AND NOT other)
  std::size_t count_and_not(const BitVector& other) const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      s += static_cast<std::size_t>(std::popcount(words_[i] & ~other.words_[i]));
    return s;
  }

  /// dst = a AND b; dst must already have the right length.
  static void and_into(BitVector& dst, const BitVector& a, const BitVector& b) {
    for (std::size_t i = 0; i < dst.words_.size(); ++i)
      dst.words_[i] = a.words_[i] & b.words_[i];
  }

  /// dst = a AND NOT b.
  static void and_not_into(BitVector& dst, const BitVector& a, const BitVector& b) {
    for (std::size_t i = 0; i < dst.words_.size(); ++i)
      dst.words_[i] = a.words_[i] & ~b.words_[i];
  }

  bool operator==(const BitVector& other) const {
    return n_ == other.n_ && words_ == other.words_;
  }

  /// 128-bit hash (two independent mixes) for memoization keys.
  std::pair<std::uint64_t, std::uint64_t> hash128() const {
    std::uint64_t h1 = 0x9E3779B97F4A7C15ULL ^ n_;
    std::uint64_t h2 = 0xC2B2AE3D27D4EB4FULL ^ (n_ << 1);
    for (std::uint64_t w : words_) {
      h1 = mix(h1 ^ w);
      h2 = mix(h2 + (w * 0x9E3779B97F4A7C15ULL + 1));
    }
    return {h1, h2};
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  void trim() {
    if (n_ % 64 != 0 && !words_.empty())
      words_.back() &= (~0ULL >> (64 - (n_ % 64)));
  }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace rid
