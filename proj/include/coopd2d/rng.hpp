#pragma once

#include <cstdint>
#include <initializer_list>

namespace coopd2d {

/// splitmix64 finalizer. Stateless 64-bit mixing step used for seed derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Stream-splitting rule: child = fold of mix64(parent ^ mix64(tag_i)) over the
/// tag path. Every consumer of randomness derives its own child seed from the
/// master seed and a unique tag path, so no two purposes share a stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(master);
  for (std::uint64_t tag : path) s = mix64(s ^ mix64(tag));
  return s;
}

/// Fixed purpose tags for derive_seed paths.
namespace seed_tag {
inline constexpr std::uint64_t scenario = 0x5C1;
inline constexpr std::uint64_t agent = 0xA6E;
inline constexpr std::uint64_t agent_init = 0xA61;
inline constexpr std::uint64_t agent_act = 0xA62;
inline constexpr std::uint64_t random_scheme = 0x7A4;
}  // namespace seed_tag

/// xoshiro256++ — portable, seedable 64-bit generator. The sequence depends
/// only on the seed, never on the platform or standard library, so results
/// are bitwise reproducible everywhere. State is initialized with splitmix64
/// as recommended by the generator's authors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t z = seed;
    for (auto& w : s_) {
      z += 0x9E3779B97F4A7C15ULL;
      std::uint64_t t = z;
      t = (t ^ (t >> 30)) * 0xBF58476D1CE4E5B9ULL;
      t = (t ^ (t >> 27)) * 0x94D049BB133111EBULL;
      w = t ^ (t >> 31);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). Mask-and-reject, unbiased and portable.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    std::uint64_t x;
    do {
      x = next_u64() & mask;
    } while (x >= n);
    return x;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace coopd2d
