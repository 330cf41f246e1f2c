#pragma once

#include <cstdint>
#include <random>

#include "sphereq/algebra.hpp"

namespace sphereq {

/// Deterministic random source. Draws are produced by std::mt19937_64 plus
/// hand-rolled rejection sampling, so identical seeds give identical streams
/// on every platform (std::uniform_int_distribution makes no such promise).
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// One raw 64-bit engine draw (building block for wide draws).
  std::uint64_t raw64() { return engine_(); }

  /// Uniform value in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw InvariantViolation("below: empty range");
    const std::uint64_t limit = ~static_cast<std::uint64_t>(0) - ~static_cast<std::uint64_t>(0) % bound;
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return draw % bound;
  }

  /// Independent generator for the index-th parallel task. Mixing the seed
  /// with the index (splitmix64 finalizer) keeps substreams uncorrelated
  /// while remaining a pure function of (seed, index).
  RandomSource substream(std::uint64_t index) const {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return RandomSource(z ^ (z >> 31));
  }

  Residue residue(std::uint64_t p) { return below(p); }

  Unit unit(std::uint64_t p) { return 1 + below(p - 1); }

  VectorZpn vector(const GroupParams& params) {
    VectorZpn v(params.n);
    for (auto& x : v) x = below(params.p);
    return v;
  }

  GroupElement element(const GroupParams& params) {
    return GroupElement{params, vector(params), unit(params.p)};
  }

  /// Element of the abelian subgroup C_{p,n} = Z_p^n x {1}.
  GroupElement central_coefficient(const GroupParams& params) {
    return GroupElement{params, vector(params), 1};
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace sphereq
