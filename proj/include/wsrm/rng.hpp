#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace wsrm {

/// SplitMix64 finalizer. Used to derive independent substream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the substream for (trial, entity) under a master seed.
///
/// Stream splitting rule: seed = splitmix64(splitmix64(master ^ splitmix64(trial)) + entity).
/// Entity 0 is the channel draw of a trial; higher entities are
/// per-algorithm initializations.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t trial,
                                       std::uint64_t entity) {
  return splitmix64(splitmix64(master ^ splitmix64(trial)) + entity);
}

/// Portable generator. std::mt19937_64 output is fixed by the standard; the
/// distributions below are implemented here because the std:: ones are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (one value per call, no cached spare).
  double normal();

  /// Circularly-symmetric complex Gaussian CN(0, 1): re and im each N(0, 1/2).
  std::complex<double> complex_normal();

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wsrm
