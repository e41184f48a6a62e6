#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>

namespace hkge {

using Rng = std::mt19937_64;

/// Labels for the independent random streams derived from one run seed.
enum class Stream : std::uint32_t { Split = 1, Init = 2, Shuffle = 3, Sampling = 4, Fallback = 5 };

/// Deterministic generator for (seed, stream, a, b); `a`/`b` typically carry
/// the epoch and batch index so batches can be assembled independently.
inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t a = 0, std::uint64_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(a),
                    static_cast<std::uint32_t>(a >> 32), static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

/// Uniform integer in [0, n). Uses rejection so the result does not depend on
/// the standard library's distribution implementation.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  // mt19937_64 covers the full 64-bit range; reject the low 2^64 mod n values.
  const std::uint64_t threshold = (0 - n) % n;
  std::uint64_t x = rng();
  while (x < threshold) x = rng();
  return x % n;
}

/// Uniform real in [lo, hi] built from 53 random bits.
inline double uniform_real(Rng& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

/// Fisher-Yates with uniform_index, portable across standard libraries.
template <typename It>
void shuffle(It first, It last, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    auto j = uniform_index(rng, i);
    std::iter_swap(first + static_cast<std::ptrdiff_t>(i - 1), first + static_cast<std::ptrdiff_t>(j));
  }
}

}  // namespace hkge
