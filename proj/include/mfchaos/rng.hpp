#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace mfchaos {

/// SplitMix64 finalizer: a full-avalanche mix of one 64-bit word.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream: every draw is a pure function of
/// (seed, stream, counter), so results are independent of evaluation order,
/// scheduling, and thread count. Used for one dedicated substream per
/// particle.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64(splitmix64(seed + 0x632be59bd9b4e019ULL) ^
                        splitmix64(stream * 0x9e3779b97f4a7c15ULL + 0x0d6e8feb86659fd9ULL))) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return splitmix64(splitmix64(key_ + counter * 0x9e3779b97f4a7c15ULL));
  }

  /// Uniform on [0, 1).
  double uniform01(std::uint64_t counter) const { return double(bits(counter) >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a log argument.
  double uniform_pos(std::uint64_t counter) const {
    return double((bits(counter) >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes counters (2k, 2k+1).
  double normal(std::uint64_t pair_index) const {
    const double u1 = uniform_pos(2 * pair_index);
    const double u2 = uniform01(2 * pair_index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
};

/// Stream ids: each particle owns two substreams, one for initialization
/// draws and one for the dynamics noise.
inline CounterRng init_stream(std::uint64_t seed, std::uint64_t particle_id) {
  return CounterRng(seed, 4 * particle_id);
}
inline CounterRng dynamics_stream(std::uint64_t seed, std::uint64_t particle_id) {
  return CounterRng(seed, 4 * particle_id + 1);
}

}  // namespace mfchaos
