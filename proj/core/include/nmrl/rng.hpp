#pragma once

#include <cstdint>

namespace nmrl {

__extension__ using Uint128 = unsigned __int128;

/// SplitMix64 (Steele, Lea & Flood). The state is a plain counter advanced by
/// the golden-ratio increment and the output is a fixed mixing function of
/// it, so a stream is fully determined by its 64-bit starting counter and
/// results are identical on every platform.
///
/// Streams: `Rng::stream(seed, purpose, index)` hashes the triple into a
/// starting counter. The harness uses one stream per (purpose, episode
/// index), so the draws of episode i never depend on how many draws earlier
/// episodes made.
class Rng {
 public:
  explicit constexpr Rng(std::uint64_t state = 0) : state_(state) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static constexpr Rng stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
    std::uint64_t h = mix(seed + 0x9e3779b97f4a7c15ULL);
    h = mix(h ^ (purpose * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
    h = mix(h ^ (index * 0x8cb92ba72f3d8dd7ULL + 0x2545f4914f6cdd1dULL));
    return Rng(h);
  }

  constexpr std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  constexpr double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) by Lemire's multiply-and-reject.
  constexpr std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
      const Uint128 m = static_cast<Uint128>(next()) * bound;
      if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
    }
  }

  constexpr bool bernoulli(double p) { return uniform() < p; }

  [[nodiscard]] constexpr std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

/// Stream purposes.
enum class StreamPurpose : std::uint64_t {
  TrainEnvironment = 1,
  TrainPolicy = 2,
  EvalEnvironment = 3,
  EvalPolicy = 4,
};

inline Rng make_stream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index) {
  return Rng::stream(seed, static_cast<std::uint64_t>(purpose), index);
}

}  // namespace nmrl
