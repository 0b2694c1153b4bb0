#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace rid {

/// All randomness in this library flows through SplitMix64 streams so that
/// results are bit-reproducible across runs, platforms and reimplementations.
using Seed = std::uint64_t;

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Derives an independent stream seed from a master seed and a stream index.
/// This is one SplitMix64 step evaluated at state (master XOR index): add the
/// golden-ratio increment, xor-shift-multiply twice, final xor-shift.
inline Seed split_rng(Seed master, std::uint64_t index) {
  return detail::mix64((master ^ index) + 0x9E3779B97F4A7C15ULL);
}

/// SplitMix64 generator (Steele, Lea & Flood; Vigna's fixed-increment form).
class SplitMix64 {
 public:
  explicit SplitMix64(Seed seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return detail::mix64(state_);
  }

  /// Draw in [0, n). Plain modulo: the bias is negligible for the n used here
  /// and the mapping is trivial to reproduce in any language.
  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

  /// Uniform double in [0, 1), 53 bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1].
  double next_unit_open() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes exactly two draws.
  double next_normal() {
    const double u = next_unit_open();
    const double v = next_unit();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
  }

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& xs) {
    for (std::size_t i = xs.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(xs[i - 1], xs[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace rid
