#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace lookdrift {

/// xoshiro256** (Blackman & Vigna), seeded through splitmix64.
///
/// Every random draw in a run comes from one of these streams:
///
///   seeding   sm = seed ^ (0xD1B54A32D192ED03 * (stream + 1)); the four state
///             words are four successive splitmix64(sm) outputs.
///   uniform   (next() >> 11) * 2^-53, in [0, 1)
///   index(n)  high 64 bits of next() * n (128-bit product)
///   normal    Box-Muller on u1 = ((next() >> 11) + 1) * 2^-53 in (0, 1] and
///             u2 = uniform(); a pair (r cos 2πu2, r sin 2πu2) per two draws.
class Rng {
 public:
  using State = std::array<std::uint64_t, 4>;

  Rng(std::uint64_t seed, std::uint64_t stream);
  static Rng from_state(const State& s);

  std::uint64_t next();
  double uniform();
  double uniform(double lo, double hi);
  std::uint64_t index(std::uint64_t n);

  /// One standard normal; the second Box-Muller value is discarded.
  double normal();
  /// Standard normals in pairs; an odd tail element discards its partner.
  void fill_normal(std::span<double> out);

  const State& state() const { return s_; }

 private:
  Rng() = default;
  State s_{};
};

/// Stream ids used by the trainer and CLI.
enum class Stream : std::uint64_t { init = 0, noise = 1, data = 2, metrics = 3 };

inline Rng make_rng(std::uint64_t seed, Stream s) {
  return Rng(seed, static_cast<std::uint64_t>(s));
}

}  // namespace lookdrift
