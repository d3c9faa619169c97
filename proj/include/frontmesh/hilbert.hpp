#pragma once

#include <array>
#include <cstdint>

#include "frontmesh/vec3.hpp"

namespace frontmesh {

/// Position of a lattice point along a 3D Hilbert curve with `bits` bits per
/// axis (Skilling's transpose algorithm), bits <= 21.
inline std::uint64_t hilbert_index(std::array<std::uint32_t, 3> x, int bits = 21) {
  const std::uint32_t top = 1u << (bits - 1);
  for (std::uint32_t q = top; q > 1; q >>= 1) {
    const std::uint32_t p = q - 1;
    for (int i = 0; i < 3; ++i) {
      if (x[static_cast<std::size_t>(i)] & q) {
        x[0] ^= p;
      } else {
        const std::uint32_t t = (x[0] ^ x[static_cast<std::size_t>(i)]) & p;
        x[0] ^= t;
        x[static_cast<std::size_t>(i)] ^= t;
      }
    }
  }
  x[1] ^= x[0];
  x[2] ^= x[1];
  std::uint32_t t = 0;
  for (std::uint32_t q = top; q > 1; q >>= 1)
    if (x[2] & q) t ^= q - 1;
  for (auto& c : x) c ^= t;

  std::uint64_t index = 0;
  for (int b = bits - 1; b >= 0; --b)
    for (int i = 0; i < 3; ++i) index = (index << 1) | ((x[static_cast<std::size_t>(i)] >> b) & 1u);
  return index;
}

/// Hilbert index of `p` inside the box [lo, hi].
inline std::uint64_t hilbert_index(const Vec3& p, const Vec3& lo, const Vec3& hi) {
  constexpr int bits = 21;
  constexpr double cells = static_cast<double>((1u << bits) - 1);
  auto quantise = [&](double v, double a, double b) {
    const double span = b - a;
    const double f = span > 0.0 ? (v - a) / span : 0.0;
    return static_cast<std::uint32_t>(std::fmin(std::fmax(f, 0.0), 1.0) * cells);
  };
  return hilbert_index({quantise(p.x, lo.x, hi.x), quantise(p.y, lo.y, hi.y), quantise(p.z, lo.z, hi.z)}, bits);
}

}  // namespace frontmesh
