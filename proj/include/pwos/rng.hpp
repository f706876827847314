#pragma once

#include <cstdint>

#include "pwos/core.hpp"

namespace pwos {

// splitmix64, used to expand seeds into well-mixed xoshiro state.
inline uint64_t splitMix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ generator. One independent instance is derived per (point, path)
// pair so results do not depend on thread count or scheduling.
class Rng {
 public:
  Rng() : Rng(0x853c49e6748fea9bULL) {}

  explicit Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& w : s_) w = splitMix64(sm);
  }

  // Derives a statistically independent stream for a (stream, substream) pair.
  static Rng forStream(uint64_t seed, uint64_t stream, uint64_t substream) {
    uint64_t sm = seed;
    uint64_t a = splitMix64(sm) ^ (stream * 0xd6e8feb86659fd93ULL);
    uint64_t b = splitMix64(sm) ^ (substream * 0xa0761d6478bd642fULL);
    uint64_t mix = a;
    mix ^= splitMix64(b);
    Rng rng;
    uint64_t sm2 = mix;
    for (auto& w : rng.s_) w = splitMix64(sm2);
    return rng;
  }

  uint64_t next() {
    auto rotl = [](uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
    uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double uniform() { return (next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniformly distributed unit vector. Uses a closed-form map (no rejection)
  // so every draw consumes a fixed number of variates.
  Vec3 unitVector() {
    double z = 1.0 - 2.0 * uniform();
    double phi = 2.0 * kPi * uniform();
    double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {rho * std::cos(phi), rho * std::sin(phi), z};
  }

  // Uniform point in the ball of given radius about the origin.
  Vec3 inBall(double radius) {
    Vec3 dir = unitVector();
    double r = radius * std::cbrt(uniform());
    return dir * r;
  }

 private:
  uint64_t s_[4];
};

}  // namespace pwos
