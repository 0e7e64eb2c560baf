#pragma once

#include <cstdint>
#include <cstring>
#include <random>

#include "albo/types.hpp"

namespace albo {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent substreams from a base seed.
constexpr std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_seed(seed ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

/// Uniform draw in [0, 1) with 53 bits of resolution. Never returns 1.0.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Content hash of a point, so a candidate's random substream follows the point itself.
template <typename Derived>
std::uint64_t hash_point(const Eigen::MatrixBase<Derived>& x) {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double v = x(i);
    if (v == 0.0) v = 0.0;  // fold -0.0 onto +0.0
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h = mix_seed(h ^ bits);
  }
  return h;
}

}  // namespace albo
