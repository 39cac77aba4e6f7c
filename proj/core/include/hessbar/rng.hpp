#pragma once

#include <cstdint>
#include <string_view>

namespace hessbar {

// Deterministic 64-bit generator: xoshiro256** seeded through splitmix64.
// Streams are derived from a (seed, label) pair, so every consumer owns an
// independent stream and adding a new consumer never perturbs existing draws.
// All distribution mapping is done here with fixed bit-level arithmetic; no
// <random> distributions are used, keeping byte-identical output across
// platforms and standard libraries.
class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view stream_label);

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer on [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Standard normal via Box-Muller (pairs cached).
  double normal();

 private:
  std::uint64_t state_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace hessbar
