// bwlab: Bouc-Wen class hysteresis toolkit
//
// Counter-based seeding: every random draw in the toolkit comes from an
// engine seeded by (global seed, stream keys...), so results never depend
// on evaluation order or thread count.
//
#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "bwlab/errors.hpp"

namespace bwlab {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys = {}) {
  return Rng(stream_seed(seed, keys));
}

inline double uniform(Rng& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline constexpr int kMaxRejections = 100000;

/// Normal(mean, sd) restricted to [lo, hi] by rejection.
inline double truncated_normal(Rng& rng, double mean, double sd, double lo, double hi) {
  if (lo == hi) return lo;
  if (sd == 0.0) {
    if (mean < lo || mean > hi) throw DomainError("degenerate truncated normal outside its bounds");
    return mean;
  }
  for (int i = 0; i < kMaxRejections; ++i) {
    const double x = mean + sd * standard_normal(rng);
    if (x >= lo && x <= hi) return x;
  }
  throw DomainError("truncated normal: rejection cap exceeded");
}

}  // namespace bwlab
