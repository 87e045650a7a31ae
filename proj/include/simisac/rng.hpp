// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace simisac {

// Deterministic random stream. All variate transforms are implemented here
// (not taken from <random> distributions, whose output is
// implementation-defined) so that a (seed, draw sequence) pair produces the
// same numbers on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent substream; mixing keeps streams decorrelated for small ids.
  Rng stream(std::uint64_t stream_id) const {
    std::uint64_t x = seed_mix_ + 0x9e3779b97f4a7c15ull * (stream_id + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return Rng(x);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; consumes exactly two uniforms per draw.
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // CN(0,1): unit-variance circularly symmetric complex normal.
  std::complex<double> cgaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return {re * 0.7071067811865475244, im * 0.7071067811865475244};
  }

  // Poisson by CDF inversion; fine for the per-mini-slot arrival means used here.
  int poisson(double mean) {
    const double u = uniform();
    double pmf = std::exp(-mean);
    double cdf = pmf;
    int k = 0;
    while (u > cdf && k < 10000) {
      ++k;
      pmf *= mean / k;
      cdf += pmf;
    }
    return k;
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_mix_ = engine_();  // one draw reserved for substream derivation
};

}  // namespace simisac
