#pragma once

#include <cstdint>

namespace chl {

/// SplitMix64 finalizer, used for seeding and replica-stream derivation.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Stream seed for replica `replica` of a master seed: a splitmix-style
/// avalanche over the pair, so replica streams are decorrelated but fully
/// reproducible from (seed, replica).
inline std::uint64_t replica_stream_seed(std::uint64_t seed, std::uint64_t replica) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ull * (replica + 1));
  return splitmix64_next(s);
}

/// xoshiro256++ with splitmix64 state expansion. Sequential runs depend on
/// nothing but the seed, so traces are replayable byte for byte.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace chl
