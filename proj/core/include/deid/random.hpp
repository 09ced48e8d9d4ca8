#pragma once

// Platform-independent keyed hashing and a small PRNG. Standard library
// distributions are implementation-defined, so all draws go through here to
// keep outputs byte-identical across platforms.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace deid {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xCBF29CE484222325ULL) noexcept {
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Hash of (seed, purpose, key). Parts are length-prefixed so that
/// ("ab","c") and ("a","bc") never collide structurally.
inline std::uint64_t keyed_hash(std::uint64_t seed, std::string_view purpose, std::string_view key) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = fnv1a64(purpose, h ^ splitmix64(purpose.size()));
  h = splitmix64(h);
  h = fnv1a64(key, h ^ splitmix64(key.size() + 0x51ED));
  return splitmix64(h);
}

/// SplitMix64 stream. Deterministic for a given seed on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, n) by rejection sampling. n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % n;
  }

  /// Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi) noexcept {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());
    return lo + static_cast<std::int64_t>(below(span));
  }

  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace deid
