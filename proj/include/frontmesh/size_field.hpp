#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "frontmesh/mesh_core.hpp"

namespace frontmesh {

/// Edge-graph distance from every vertex to the nearest boundary vertex
/// (multi-source Dijkstra). Infinite on closed surfaces.
inline std::vector<double> boundary_distance(const SurfaceMesh& mesh) {
  const auto nv = static_cast<std::size_t>(mesh.num_vertices());
  std::vector<double> dist(nv, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.is_boundary_vertex(v)) {
      dist[static_cast<std::size_t>(v)] = 0.0;
      heap.emplace(0.0, v);
    }
  }
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[static_cast<std::size_t>(v)]) continue;
    for (Index w : mesh.vertex_neighbors(v)) {
      const double nd = d + distance(mesh.vertex(v), mesh.vertex(w));
      if (nd < dist[static_cast<std::size_t>(w)]) {
        dist[static_cast<std::size_t>(w)] = nd;
        heap.emplace(nd, w);
      }
    }
  }
  return dist;
}

/// Target edge length on the surface: either constant, or graded away from
/// the boundary as min(h_max, h_min + g * d).
class SizeField {
 public:
  enum class Kind { Constant, Graded };

  static SizeField constant(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("constant size must be positive");
    SizeField f;
    f.kind_ = Kind::Constant;
    f.h_min_ = f.h_max_ = h;
    return f;
  }

  static SizeField graded(const SurfaceMesh& mesh, double h_min, double h_max, double rate) {
    if (!(h_min > 0.0) || !(h_max >= h_min) || !std::isfinite(h_max))
      throw ConfigError("graded size needs 0 < h_min <= h_max");
    if (!(rate >= 0.0)) throw ConfigError("gradation rate must be non-negative");
    SizeField f;
    f.kind_ = Kind::Graded;
    f.h_min_ = h_min;
    f.h_max_ = h_max;
    f.rate_ = rate;
    f.distance_ = boundary_distance(mesh);
    return f;
  }

  Kind kind() const { return kind_; }
  double h_min() const { return h_min_; }
  double h_max() const { return h_max_; }
  double rate() const { return rate_; }

  /// Boundary distance interpolated at `p` (graded fields only).
  double distance_at(const SurfaceMesh& mesh, const SurfacePoint& p) const {
    const Tri& tri = mesh.triangle(p.triangle);
    double d = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double di = distance_[static_cast<std::size_t>(tri[static_cast<std::size_t>(i)])];
      if (std::isinf(di)) return di;
      d += p.bary[static_cast<std::size_t>(i)] * di;
    }
    return std::fmax(d, 0.0);
  }

  double eval(const SurfaceMesh& mesh, const SurfacePoint& p) const {
    if (kind_ == Kind::Constant) return h_min_;
    const double d = distance_at(mesh, p);
    if (std::isinf(d)) return h_max_;
    return std::fmin(h_max_, h_min_ + rate_ * d);
  }

 private:
  Kind kind_ = Kind::Constant;
  double h_min_ = 1.0;
  double h_max_ = 1.0;
  double rate_ = 0.0;
  std::vector<double> distance_;
};

}  // namespace frontmesh
