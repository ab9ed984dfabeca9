#pragma once

#include <cmath>
#include <cstdint>

namespace mfvdm {

/// Counter-based generator: output n of stream (seed, stream) is a pure
/// function of (seed, stream, n), so per-image streams can be drawn in any
/// order or in parallel and still reproduce bit-for-bit. The mixing function
/// is the SplitMix64 finaliser.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL))) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() { return mix(key_ + 0x9E3779B97F4A7C15ULL * counter_++); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; both variates are used.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 6.283185307179586 * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stream ids, one per consumer, so that adding a consumer never shifts another's draws.
namespace rng_stream {
inline constexpr std::uint64_t kPhantom = 1;
inline constexpr std::uint64_t kRotations = 2;
inline constexpr std::uint64_t kDefocus = 3;
inline constexpr std::uint64_t kShifts = 4;
inline constexpr std::uint64_t kNoiseBase = 1ULL << 32;  // + image index
inline constexpr std::uint64_t kLanczosStart = 5;
}  // namespace rng_stream

}  // namespace mfvdm
