#pragma once

#include <cstdint>
#include <string_view>

namespace chtest {

/// Counter-free splittable PRNG (splitmix64). Every consumer owns its own
/// instance seeded from mix_seed chains, so there is no shared RNG state and
/// results are identical regardless of thread schedule. The normal()
/// transform is Box-Muller, implemented here rather than taken from
/// <random> so that streams are bit-identical across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0,1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0,1]; safe as a log() argument.
  double uniform01_open() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (pair cached).
  double normal();

  /// Unbiased integer in [0, bound) by rejection.
  std::uint64_t uniform_below(std::uint64_t bound);

private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Order-sensitive combine of two 64-bit values through the splitmix64
/// finalizer; used to derive per-trial / per-component seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// FNV-1a hash of a string (detector labels, strategy kinds).
std::uint64_t hash_string(std::string_view s);

}  // namespace chtest
