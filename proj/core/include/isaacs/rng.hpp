#pragma once

#include <cstdint>
#include <numbers>
#include <cmath>

namespace isaacs::rng {

/// Stateless counter-based generator. Every draw is a pure function of
/// (seed, stream, counter), so substreams never interact and sampling is
/// reproducible bit-for-bit across platforms and thread schedules.
/// Identity string recorded in artifact metadata: see kGeneratorId.
inline constexpr const char* kGeneratorId = "smix64x3-ctr/box-muller";

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

/// splitmix64 finalizer.
inline std::uint64_t mix(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t word(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  std::uint64_t h = mix(seed);
  h = mix(h ^ mix(stream));
  return mix(h + counter * kGolden);
}

/// Builds a stream id from coordinates (path/step/atom/purpose and the like).
inline std::uint64_t stream_id(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                               std::uint64_t d = 0) {
  std::uint64_t h = mix(a);
  h = mix(h ^ mix(b + 1));
  h = mix(h ^ mix(c + 2));
  return mix(h ^ mix(d + 3));
}

/// Uniform draw in (0, 1]: 53 significant bits, never exactly zero.
inline double u01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const std::uint64_t w = word(seed, stream, counter) >> 11;
  return static_cast<double>(w + 1) * 0x1.0p-53;
}

/// Standard normal via Box-Muller; consumes counters (2c, 2c+1).
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const double a = u01(seed, stream, 2 * counter);
  const double b = u01(seed, stream, 2 * counter + 1);
  const double r = std::sqrt(-2.0 * std::log(a));
  return r * std::cos(2.0 * std::numbers::pi * b);
}

/// Poisson(mean) by inversion of exponential products; the stream must be
/// dedicated to this draw since consumption length varies.
inline int poisson(double mean, std::uint64_t seed, std::uint64_t stream) {
  const double floor = std::exp(-mean);
  double p = 1.0;
  int k = 0;
  std::uint64_t counter = 0;
  do {
    p *= u01(seed, stream, counter++);
    ++k;
  } while (p > floor && k < 1000000);
  return k - 1;
}

}  // namespace isaacs::rng
