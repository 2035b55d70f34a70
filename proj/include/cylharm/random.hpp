#pragma once

// Small deterministic generators shared by the sphere seeding and the walkers.
// Bit-exact across platforms: no std:: distributions are involved.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace cylharm {

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// SplitMix64: output k is a pure function of (state0, k), so substreams keyed by
/// (seed, index) are independent of scheduling.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  /// Substream for a (seed, stream index) pair.
  static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(splitmix64_mix(seed ^ splitmix64_mix(index + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64_mix(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1].
  double uniform_open_low() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (one value per call; the sine branch is discarded).
  double normal() {
    const double r = std::sqrt(-2.0 * std::log(uniform_open_low()));
    return r * std::cos(2.0 * std::numbers::pi * uniform());
  }

  /// Uniform point on the unit sphere S^{d-1}, d = out.size().
  void sphere_point(std::span<double> out) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& v : out) {
        v = normal();
        norm2 += v * v;
      }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& v : out) v *= inv;
  }

 private:
  std::uint64_t state_;
};

}  // namespace cylharm
