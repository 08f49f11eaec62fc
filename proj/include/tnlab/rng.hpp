#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace tnlab {

/// Coordinates identifying one stochastic draw.  Every random number in the
/// library is a pure function of (seed, sample, step, stream), so results are
/// reproducible bit-for-bit regardless of worker count or evaluation order.
struct SeedCoords {
  std::uint64_t seed = 0;
  std::uint32_t sample = 0;
  std::uint32_t step = 0;
};

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         std::array<std::uint32_t, 2>& key) {
  constexpr std::uint64_t M0 = 0xD2511F53ull;
  constexpr std::uint64_t M1 = 0xCD9E8D57ull;
  std::uint64_t p0 = M0 * ctr[0];
  std::uint64_t p1 = M1 * ctr[2];
  std::array<std::uint32_t, 4> next = {
      static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
      static_cast<std::uint32_t>(p1),
      static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
      static_cast<std::uint32_t>(p0)};
  ctr = next;
  key[0] += 0x9E3779B9u;
  key[1] += 0xBB67AE85u;
}

}  // namespace detail

/// Philox4x32-10 counter-based generator: 128-bit counter, 64-bit key,
/// 128 bits of output per block.  Stateless by construction.
inline std::array<std::uint32_t, 4> philox4x32(std::uint64_t key64,
                                               std::uint32_t c0, std::uint32_t c1,
                                               std::uint32_t c2, std::uint32_t c3) {
  std::array<std::uint32_t, 4> ctr = {c0, c1, c2, c3};
  std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(key64),
                                      static_cast<std::uint32_t>(key64 >> 32)};
  for (int r = 0; r < 10; ++r) detail::philox_round(ctr, key);
  return ctr;
}

/// Uniform double in (0,1] from two 32-bit words (53-bit resolution).
inline double uniform_from_bits(std::uint32_t hi, std::uint32_t lo) {
  std::uint64_t u = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return ((u >> 11) + 1) * 0x1.0p-53;
}

/// Two independent standard normals for the given draw coordinates.
/// `stream` distinguishes draws within one (sample, step), e.g. noise modes.
inline std::array<double, 2> normal_pair(const SeedCoords& sc, std::uint32_t stream) {
  auto words = philox4x32(sc.seed, sc.sample, sc.step, stream, 0u);
  double u1 = uniform_from_bits(words[0], words[1]);
  double u2 = uniform_from_bits(words[2], words[3]);
  double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
}

/// Uniform integer in [0, n) for bootstrap resampling; same keying scheme.
inline std::uint32_t uniform_index(std::uint64_t seed, std::uint32_t resample,
                                   std::uint32_t draw, std::uint32_t n) {
  auto words = philox4x32(seed, 0xB007u, resample, draw, 0u);
  std::uint64_t u = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return static_cast<std::uint32_t>(u % n);
}

}  // namespace tnlab
