#pragma once

// Reproducible random streams. Every seeded component in the library draws
// from xoshiro256** seeded through splitmix64, so a 64-bit seed pins the
// whole stream on every platform.

#include <algorithm>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace osa {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

class Xoshiro256StarStar {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256StarStar(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return next(); }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Unbiased integer in [0, bound) by rejection: draws below 2^64 mod bound
  // are discarded.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(uniform_below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> s_{};
};

// First `count` entries of `items` after a forward partial Fisher-Yates pass:
// position k swaps with k + uniform_below(size - k).
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> items, std::size_t count,
                                          Xoshiro256StarStar& rng) {
  const std::size_t size = items.size();
  for (std::size_t k = 0; k < count && k < size; ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.uniform_below(size - k));
    std::swap(items[k], items[pick]);
  }
  items.resize(std::min(count, size));
  return items;
}

// Derives an independent 64-bit seed from a base seed and two indices.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  SplitMix64 sm((a << 32) ^ b);
  return base ^ sm.next();
}

}  // namespace osa
