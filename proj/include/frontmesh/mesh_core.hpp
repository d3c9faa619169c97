#pragma once

// Triangle surface mesh with per-edge adjacency, barycentric geometry and
// boundary extraction. Edge i of a triangle is the edge opposite its vertex i,
// running from vertex (i+1)%3 to vertex (i+2)%3 in the triangle's winding.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "frontmesh/errors.hpp"
#include "frontmesh/vec3.hpp"

namespace frontmesh {

using Index = std::int32_t;
using Tri = std::array<Index, 3>;
using Bary = std::array<double, 3>;

inline constexpr Index kNoNeighbor = -1;

inline constexpr int next3(int i) { return i == 2 ? 0 : i + 1; }
inline constexpr int prev3(int i) { return i == 0 ? 2 : i - 1; }

/// A location on a base mesh: a triangle and barycentric coordinates in it.
struct SurfacePoint {
  Index triangle = 0;
  Bary bary{1.0, 0.0, 0.0};

  friend bool operator==(const SurfacePoint&, const SurfacePoint&) = default;
};

/// Ordered boundary vertices. Closed loops do not repeat their first vertex.
struct BoundaryLoop {
  std::vector<Index> vertices;
  bool closed = true;
};

class SurfaceMesh {
 public:
  SurfaceMesh() = default;

  /// Validates the triangles and builds adjacency. Throws MeshError on bad
  /// indices, degenerate triangles, non-manifold edges or inconsistent
  /// orientation.
  SurfaceMesh(std::vector<Vec3> vertices, std::vector<Tri> triangles)
      : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    build();
  }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Tri>& triangles() const { return triangles_; }
  Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
  Index num_triangles() const { return static_cast<Index>(triangles_.size()); }
  bool empty() const { return triangles_.empty(); }

  const Vec3& vertex(Index v) const { return vertices_[static_cast<std::size_t>(v)]; }
  const Tri& triangle(Index t) const { return triangles_[static_cast<std::size_t>(t)]; }
  const Vec3& corner(Index t, int i) const { return vertex(triangle(t)[static_cast<std::size_t>(i)]); }

  /// Triangle across edge `edge` of `t`, or kNoNeighbor on the boundary.
  Index neighbor(Index t, int edge) const {
    return adjacency_[static_cast<std::size_t>(t)][static_cast<std::size_t>(edge)];
  }
  const std::array<Index, 3>& neighbors(Index t) const { return adjacency_[static_cast<std::size_t>(t)]; }

  /// Local index of `v` in triangle `t`, or -1.
  int local_index(Index t, Index v) const {
    const Tri& tri = triangle(t);
    for (int i = 0; i < 3; ++i)
      if (tri[static_cast<std::size_t>(i)] == v) return i;
    return -1;
  }

  /// Edge index of `t` that is shared with `other`, or -1.
  int edge_towards(Index t, Index other) const {
    for (int i = 0; i < 3; ++i)
      if (neighbor(t, i) == other) return i;
    return -1;
  }

  Vec3 area_vector(Index t) const {
    return 0.5 * cross(corner(t, 1) - corner(t, 0), corner(t, 2) - corner(t, 0));
  }
  double area(Index t) const { return norm(area_vector(t)); }
  Vec3 face_normal(Index t) const { return normalized(area_vector(t)); }
  Vec3 centroid(Index t) const { return (corner(t, 0) + corner(t, 1) + corner(t, 2)) / 3.0; }

  /// Triangles incident to `v`.
  std::span<const Index> vertex_triangles(Index v) const {
    const auto b = star_offsets_[static_cast<std::size_t>(v)];
    const auto e = star_offsets_[static_cast<std::size_t>(v) + 1];
    return {star_.data() + b, star_.data() + e};
  }

  /// Vertices sharing an edge with `v`, sorted ascending.
  std::span<const Index> vertex_neighbors(Index v) const {
    const auto b = ring_offsets_[static_cast<std::size_t>(v)];
    const auto e = ring_offsets_[static_cast<std::size_t>(v) + 1];
    return {ring_.data() + b, ring_.data() + e};
  }

  bool is_boundary_vertex(Index v) const { return boundary_vertex_[static_cast<std::size_t>(v)] != 0; }
  bool has_boundary() const { return boundary_edge_count_ > 0; }
  std::size_t boundary_edge_count() const { return boundary_edge_count_; }

  double bbox_diagonal() const { return bbox_diagonal_; }
  Vec3 bbox_min() const { return bbox_min_; }
  Vec3 bbox_max() const { return bbox_max_; }

  /// Mean edge length over all unique edges.
  double mean_edge_length() const {
    double sum = 0.0;
    std::size_t count = 0;
    for (Index t = 0; t < num_triangles(); ++t) {
      for (int i = 0; i < 3; ++i) {
        const Index n = neighbor(t, i);
        if (n != kNoNeighbor && n < t) continue;
        sum += distance(corner(t, next3(i)), corner(t, prev3(i)));
        ++count;
      }
    }
    return count ? sum / static_cast<double>(count) : 0.0;
  }

  /// Surface point sitting on vertex `v`, expressed in its lowest-index
  /// incident triangle.
  SurfacePoint vertex_point(Index v) const {
    const auto star = vertex_triangles(v);
    if (star.empty()) throw MeshError("vertex " + std::to_string(v) + " has no incident triangle");
    const Index t = star.front();
    SurfacePoint p{t, {0.0, 0.0, 0.0}};
    p.bary[static_cast<std::size_t>(local_index(t, v))] = 1.0;
    return p;
  }

 private:
  static std::uint64_t edge_key(Index a, Index b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
  }

  void build() {
    const auto nv = vertices_.size();
    const auto nt = triangles_.size();

    bbox_min_ = Vec3{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
                     std::numeric_limits<double>::max()};
    bbox_max_ = -bbox_min_;
    for (const Vec3& p : vertices_) {
      bbox_min_ = {std::min(bbox_min_.x, p.x), std::min(bbox_min_.y, p.y), std::min(bbox_min_.z, p.z)};
      bbox_max_ = {std::max(bbox_max_.x, p.x), std::max(bbox_max_.y, p.y), std::max(bbox_max_.z, p.z)};
    }
    bbox_diagonal_ = nv ? distance(bbox_min_, bbox_max_) : 0.0;

    const double min_area = 1e-14 * bbox_diagonal_ * bbox_diagonal_;
    for (std::size_t t = 0; t < nt; ++t) {
      const Tri& tri = triangles_[t];
      for (Index v : tri)
        if (v < 0 || static_cast<std::size_t>(v) >= nv)
          throw MeshError("triangle " + std::to_string(t) + " references invalid vertex " + std::to_string(v));
      if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] || area(static_cast<Index>(t)) <= min_area)
        throw MeshError("degenerate triangle " + std::to_string(t));
    }

    {
      std::unordered_map<std::uint64_t, int> uses;
      uses.reserve(nt * 3);
      for (const Tri& tri : triangles_) {
        for (int i = 0; i < 3; ++i) {
          const Index a = tri[static_cast<std::size_t>(i)];
          const Index b = tri[static_cast<std::size_t>(next3(i))];
          if (++uses[edge_key(std::min(a, b), std::max(a, b))] > 2)
            throw MeshError("non-manifold edge " + std::to_string(std::min(a, b)) + "-" +
                            std::to_string(std::max(a, b)));
        }
      }
    }

    // Half-edges keyed by (from, to) in triangle winding order.
    std::unordered_map<std::uint64_t, std::pair<Index, int>> half_edges;
    half_edges.reserve(nt * 3);
    for (std::size_t t = 0; t < nt; ++t) {
      for (int i = 0; i < 3; ++i) {
        const Index a = triangles_[t][static_cast<std::size_t>(next3(i))];
        const Index b = triangles_[t][static_cast<std::size_t>(prev3(i))];
        if (!half_edges.emplace(edge_key(a, b), std::pair{static_cast<Index>(t), i}).second)
          throw MeshError("inconsistent orientation at edge " + std::to_string(a) + "-" + std::to_string(b));
      }
    }

    adjacency_.assign(nt, {kNoNeighbor, kNoNeighbor, kNoNeighbor});
    boundary_vertex_.assign(nv, 0);
    boundary_edge_count_ = 0;
    for (std::size_t t = 0; t < nt; ++t) {
      for (int i = 0; i < 3; ++i) {
        const Index a = triangles_[t][static_cast<std::size_t>(next3(i))];
        const Index b = triangles_[t][static_cast<std::size_t>(prev3(i))];
        auto it = half_edges.find(edge_key(b, a));
        if (it != half_edges.end()) {
          adjacency_[t][static_cast<std::size_t>(i)] = it->second.first;
        } else {
          boundary_vertex_[static_cast<std::size_t>(a)] = 1;
          boundary_vertex_[static_cast<std::size_t>(b)] = 1;
          ++boundary_edge_count_;
        }
      }
    }

    star_offsets_.assign(nv + 1, 0);
    for (const Tri& tri : triangles_)
      for (Index v : tri) ++star_offsets_[static_cast<std::size_t>(v) + 1];
    for (std::size_t v = 0; v < nv; ++v) star_offsets_[v + 1] += star_offsets_[v];
    star_.assign(star_offsets_.back(), 0);
    {
      auto fill = star_offsets_;
      for (std::size_t t = 0; t < nt; ++t)
        for (Index v : triangles_[t]) star_[fill[static_cast<std::size_t>(v)]++] = static_cast<Index>(t);
    }

    ring_offsets_.assign(nv + 1, 0);
    ring_.clear();
    std::vector<Index> scratch;
    for (std::size_t v = 0; v < nv; ++v) {
      scratch.clear();
      for (auto k = star_offsets_[v]; k < star_offsets_[v + 1]; ++k) {
        const Tri& tri = triangles_[static_cast<std::size_t>(star_[k])];
        for (Index w : tri)
          if (w != static_cast<Index>(v)) scratch.push_back(w);
      }
      std::sort(scratch.begin(), scratch.end());
      scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
      ring_.insert(ring_.end(), scratch.begin(), scratch.end());
      ring_offsets_[v + 1] = ring_.size();
    }
  }

  std::vector<Vec3> vertices_;
  std::vector<Tri> triangles_;
  std::vector<std::array<Index, 3>> adjacency_;
  std::vector<std::size_t> star_offsets_;
  std::vector<Index> star_;
  std::vector<std::size_t> ring_offsets_;
  std::vector<Index> ring_;
  std::vector<char> boundary_vertex_;
  std::size_t boundary_edge_count_ = 0;
  Vec3 bbox_min_{};
  Vec3 bbox_max_{};
  double bbox_diagonal_ = 0.0;
};

inline void check_triangle_index(const SurfaceMesh& mesh, Index t) {
  if (t < 0 || t >= mesh.num_triangles())
    throw MeshError("invalid triangle index " + std::to_string(t));
}

/// Barycentric sum within 1e-10 and each coordinate in [-1e-9, 1 + 1e-9].
inline bool is_valid(const SurfaceMesh& mesh, const SurfacePoint& p) {
  if (p.triangle < 0 || p.triangle >= mesh.num_triangles()) return false;
  constexpr double eps = 1e-9;
  double sum = 0.0;
  for (double l : p.bary) {
    if (!(l >= -eps && l <= 1.0 + eps)) return false;
    sum += l;
  }
  return std::fabs(sum - 1.0) <= 1e-10;
}

inline Vec3 position_of(const SurfaceMesh& mesh, const SurfacePoint& p) {
  check_triangle_index(mesh, p.triangle);
  return p.bary[0] * mesh.corner(p.triangle, 0) + p.bary[1] * mesh.corner(p.triangle, 1) +
         p.bary[2] * mesh.corner(p.triangle, 2);
}

/// Barycentric coordinates of the projection of `x` onto the plane of `t`.
/// Coordinates may be negative when the projection falls outside.
inline Bary barycentric(const SurfaceMesh& mesh, Index t, const Vec3& x) {
  check_triangle_index(mesh, t);
  const Vec3& a = mesh.corner(t, 0);
  const Vec3& b = mesh.corner(t, 1);
  const Vec3& c = mesh.corner(t, 2);
  const Vec3 n = cross(b - a, c - a);
  const double nn = dot(n, n);
  if (!(nn > 0.0)) throw MeshError("degenerate triangle " + std::to_string(t));
  const double l0 = dot(n, cross(c - b, x - b)) / nn;
  const double l1 = dot(n, cross(a - c, x - c)) / nn;
  return {l0, l1, 1.0 - l0 - l1};
}

/// Walks from triangle `start` towards the triangle holding the projection of
/// `x`. Stops at the boundary, on a cycle, or after `max_steps`; the result is
/// clamped into the last triangle.
inline SurfacePoint locate_walk(const SurfaceMesh& mesh, Index start, const Vec3& x, int max_steps = 1000) {
  Index t = start;
  Index prev = kNoNeighbor;
  Bary b = barycentric(mesh, t, x);
  for (int step = 0; step < max_steps; ++step) {
    int worst = 0;
    for (int i = 1; i < 3; ++i)
      if (b[static_cast<std::size_t>(i)] < b[static_cast<std::size_t>(worst)]) worst = i;
    if (b[static_cast<std::size_t>(worst)] >= 0.0) break;
    const Index next = mesh.neighbor(t, worst);
    if (next == kNoNeighbor || next == prev) break;
    prev = t;
    t = next;
    b = barycentric(mesh, t, x);
  }
  Bary c{std::fmax(b[0], 0.0), std::fmax(b[1], 0.0), std::fmax(b[2], 0.0)};
  const double s = c[0] + c[1] + c[2];
  for (double& v : c) v /= s;
  return {t, c};
}

/// Boundary loops oriented so that the surface lies to the left when the
/// triangles are counter-clockwise. Closed surfaces return an empty list.
inline std::vector<BoundaryLoop> boundary_loops(const SurfaceMesh& mesh) {
  // Boundary half-edges from -> to, in triangle winding order.
  std::unordered_multimap<Index, Index> outgoing;
  std::vector<std::pair<Index, Index>> order;
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    for (int i = 0; i < 3; ++i) {
      if (mesh.neighbor(t, i) != kNoNeighbor) continue;
      const Index a = mesh.triangle(t)[static_cast<std::size_t>(next3(i))];
      const Index b = mesh.triangle(t)[static_cast<std::size_t>(prev3(i))];
      outgoing.emplace(a, b);
      order.emplace_back(a, b);
    }
  }

  std::vector<BoundaryLoop> loops;
  auto take = [&](Index from, Index to) {
    auto [lo, hi] = outgoing.equal_range(from);
    for (auto it = lo; it != hi; ++it) {
      if (it->second == to) {
        outgoing.erase(it);
        return true;
      }
    }
    return false;
  };
  for (const auto& [a, b] : order) {
    if (!take(a, b)) continue;
    BoundaryLoop loop;
    loop.vertices.push_back(a);
    Index cur = b;
    while (cur != a) {
      loop.vertices.push_back(cur);
      auto it = outgoing.find(cur);
      if (it == outgoing.end()) {
        loop.closed = false;
        break;
      }
      const Index nxt = it->second;
      outgoing.erase(it);
      cur = nxt;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

/// Closed triangulated sphere centred at the origin: 20 * 4^subdivisions
/// triangles, outward-facing counter-clockwise winding.
inline SurfaceMesh make_icosphere(int subdivisions, double radius) {
  if (subdivisions < 0) throw ConfigError("icosphere subdivisions must be >= 0");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                             {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& v : verts) v = normalized(v);
  std::vector<Tri> tris = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                           {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                           {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::unordered_map<std::uint64_t, Index> midpoints;
    auto midpoint = [&](Index a, Index b) {
      const auto key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) | static_cast<std::uint32_t>(std::max(a, b));
      auto it = midpoints.find(key);
      if (it != midpoints.end()) return it->second;
      const Index id = static_cast<Index>(verts.size());
      verts.push_back(normalized(verts[static_cast<std::size_t>(a)] + verts[static_cast<std::size_t>(b)]));
      midpoints.emplace(key, id);
      return id;
    };
    std::vector<Tri> next;
    next.reserve(tris.size() * 4);
    for (const Tri& tri : tris) {
      const Index ab = midpoint(tri[0], tri[1]);
      const Index bc = midpoint(tri[1], tri[2]);
      const Index ca = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }
  for (Vec3& v : verts) v = radius * v;
  return SurfaceMesh(std::move(verts), std::move(tris));
}

}  // namespace frontmesh
