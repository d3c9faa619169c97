#pragma once

// Greedy pairing of adjacent triangles into quadrilaterals.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "frontmesh/predicates.hpp"
#include "frontmesh/quad_quality.hpp"

namespace frontmesh {

struct QuadElement {
  std::array<Index, 4> v{};       // cyclic, in the winding of the source triangles
  std::array<Index, 2> source{};  // triangle indices
  double quality = 0.0;
};

namespace detail {

inline Vec3 quad_normal(const std::array<Vec3, 4>& x) { return normalized(cross(x[2] - x[0], x[3] - x[1])); }

// Interior angle at corner k, in [0, 2 pi), measured against normal n.
inline double quad_corner(const std::array<Vec3, 4>& x, int k, const Vec3& n) {
  const Vec3& c = x[static_cast<std::size_t>(k)];
  const Vec3 a = x[static_cast<std::size_t>((k + 1) % 4)] - c;
  const Vec3 b = x[static_cast<std::size_t>((k + 3) % 4)] - c;
  double t = std::atan2(dot(n, cross(a, b)), dot(a, b));
  if (t < 0.0) t += 2.0 * kPi;
  return t;
}

inline bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double o1 = orient2d(a, b, c), o2 = orient2d(a, b, d);
  const double o3 = orient2d(c, d, a), o4 = orient2d(c, d, b);
  return ((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0));
}

}  // namespace detail

/// True if no two opposite sides of the quad cross.
inline bool is_simple_quad(const std::array<Vec3, 4>& x) {
  const Vec3 n = detail::quad_normal(x);
  if (norm2(n) == 0.0) return false;
  const TangentFrame f = make_frame(n);
  std::array<Vec2, 4> p;
  for (std::size_t k = 0; k < 4; ++k) p[k] = {dot(x[k], f.t1), dot(x[k], f.t2)};
  return !detail::segments_cross(p[0], p[1], p[2], p[3]) && !detail::segments_cross(p[1], p[2], p[3], p[0]);
}

inline bool is_convex_quad(const std::array<Vec3, 4>& x) {
  const Vec3 n = detail::quad_normal(x);
  for (int k = 0; k < 4; ++k)
    if (detail::quad_corner(x, k, n) >= kPi) return false;
  return true;
}

/// Minimum over the corners of 1 - |pi/2 - theta| / (pi/2), clamped to
/// [0, 1]. Throws for self-intersecting quads.
inline double quad_quality(const std::array<Vec3, 4>& x) {
  if (!is_simple_quad(x)) throw AlgorithmError("quad is not simple");
  const Vec3 n = detail::quad_normal(x);
  double q = 1.0;
  for (int k = 0; k < 4; ++k) q = std::min(q, std::clamp(q_angle(detail::quad_corner(x, k, n)), 0.0, 1.0));
  return q;
}

inline double quad_quality(const QuadElement& quad, std::span<const Vec3> positions) {
  std::array<Vec3, 4> x;
  for (std::size_t k = 0; k < 4; ++k) x[k] = positions[static_cast<std::size_t>(quad.v[k])];
  return quad_quality(x);
}

struct RecombineResult {
  std::vector<QuadElement> quads;
  std::vector<Index> leftover;  // unmatched triangles
  std::size_t nonconvex = 0;
  double mean_quality = 0.0;
  double min_quality = 0.0;
};

/// Scores every pair of edge-adjacent triangles by the quality of their
/// union and matches greedily in descending quality, skipping pairs below
/// `threshold` or touching a matched triangle. Fills out.quad_pairs.
inline RecombineResult recombine(OutputMesh& out, double threshold = 0.3) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("quad threshold must lie in [0, 1]");
  RecombineResult r;
  out.quad_pairs.clear();
  if (out.triangles.empty()) return r;
  const SurfaceMesh mesh(out.vertices, out.triangles);

  std::vector<QuadElement> candidates;
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    for (int e = 0; e < 3; ++e) {
      const Index g = mesh.neighbor(t, e);
      if (g == kNoNeighbor || g < t) continue;
      const Tri& a = mesh.triangle(t);
      const Index c = a[static_cast<std::size_t>(e)], u = a[static_cast<std::size_t>(next3(e))],
                  w = a[static_cast<std::size_t>(prev3(e))];
      const Tri& b = mesh.triangle(g);
      Index opp = -1;
      for (Index x : b)
        if (x != u && x != w) opp = x;
      QuadElement q;
      q.v = {c, u, opp, w};
      q.source = {t, g};
      std::array<Vec3, 4> x;
      for (std::size_t k = 0; k < 4; ++k) x[k] = mesh.vertex(q.v[k]);
      if (!is_simple_quad(x)) continue;
      q.quality = quad_quality(x);
      if (q.quality < threshold) continue;
      candidates.push_back(q);
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const QuadElement& a, const QuadElement& b) { return a.quality > b.quality; });

  std::vector<char> used(out.triangles.size(), 0);
  double sum = 0.0;
  r.min_quality = 1.0;
  for (const QuadElement& q : candidates) {
    const auto s0 = static_cast<std::size_t>(q.source[0]), s1 = static_cast<std::size_t>(q.source[1]);
    if (used[s0] || used[s1]) continue;
    used[s0] = used[s1] = 1;
    r.quads.push_back(q);
    out.quad_pairs.push_back(q.source);
    sum += q.quality;
    r.min_quality = std::min(r.min_quality, q.quality);
    std::array<Vec3, 4> x;
    for (std::size_t k = 0; k < 4; ++k) x[k] = out.vertices[static_cast<std::size_t>(q.v[k])];
    if (!is_convex_quad(x)) ++r.nonconvex;
  }
  for (std::size_t t = 0; t < used.size(); ++t)
    if (!used[t]) r.leftover.push_back(static_cast<Index>(t));
  if (!r.quads.empty()) r.mean_quality = sum / static_cast<double>(r.quads.size());
  else r.min_quality = 0.0;
  return r;
}

}  // namespace frontmesh
