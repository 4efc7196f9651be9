#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fvn {

// All randomness in the library flows through mt19937_64 engines whose seeds
// are derived from a master seed plus a handful of counters (stream tag,
// replication, round, vehicle id, ...). mt19937_64 output is fully specified
// by the standard, so identical (master seed, counters) give identical draws
// on every platform.
using Rng = std::mt19937_64;

// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based seed derivation: feed each counter through the mixer so that
// adjacent counters give statistically unrelated streams and adding more
// replications never perturbs earlier ones.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0,
                                 std::uint64_t d = 0) {
  std::uint64_t s = mix64(master);
  s = mix64(s ^ mix64(a));
  s = mix64(s ^ mix64(b));
  s = mix64(s ^ mix64(c));
  s = mix64(s ^ mix64(d));
  return s;
}

// Stream tags keep independent uses of the same (replication, round) counters
// from colliding.
enum class Stream : std::uint64_t {
  fleet = 1,
  channel = 2,
  partition = 3,
  local_sgd = 4,
  model_init = 5,
  dataset = 6,
};

inline Rng make_rng(std::uint64_t master, Stream tag, std::uint64_t a = 0,
                    std::uint64_t b = 0, std::uint64_t c = 0) {
  return Rng(derive_seed(master, static_cast<std::uint64_t>(tag), a, b, c));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unit-mean exponential via inverse CDF; strictly positive.
inline double exp_unit(Rng& rng) {
  double u = uniform_unit(rng);
  double g = -std::log1p(-u);
  return g > 0.0 ? g : 0x1.0p-53;
}

}  // namespace fvn
