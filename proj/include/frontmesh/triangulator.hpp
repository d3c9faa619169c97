#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <unordered_map>
#include <span>
#include <utility>
#include <vector>

#include "frontmesh/delaunay2d.hpp"
#include "frontmesh/direction_field.hpp"
#include "frontmesh/frontal_insertion.hpp"
#include "frontmesh/predicates.hpp"
#include "frontmesh/topo_mesh.hpp"

namespace frontmesh {

/// Output of the pipeline: triangles over the generated points, optionally
/// paired into quads by recombination.
struct OutputMesh {
  std::vector<Vec3> vertices;
  std::vector<SurfacePoint> locations;  // back-reference onto the base mesh
  std::vector<Tri> triangles;
  std::vector<std::array<Index, 2>> quad_pairs;  // triangle index pairs sharing an edge
};

struct TriangulationStats {
  bool planar = false;
  std::size_t removed_base_vertices = 0;
  std::size_t flips = 0;
  int flip_sweeps = 0;
  bool flips_converged = true;
  double area_before_flips = 0.0;
  double area_after_flips = 0.0;
};

/// Normal of the plane holding every vertex of `mesh` (within 1e-9 of the
/// bounding-box diagonal), if there is one.
inline std::optional<Vec3> plane_normal(const SurfaceMesh& mesh) {
  Vec3 sum;
  for (Index t = 0; t < mesh.num_triangles(); ++t) sum += mesh.area_vector(t);
  if (norm(sum) <= 1e-12 * mesh.bbox_diagonal() * mesh.bbox_diagonal()) return std::nullopt;
  const Vec3 n = normalized(sum);
  const Vec3& o = mesh.vertex(0);
  const double tol = 1e-9 * mesh.bbox_diagonal();
  for (const Vec3& x : mesh.vertices())
    if (std::fabs(dot(x - o, n)) > tol) return std::nullopt;
  return n;
}

/// Total area of a triangle list.
inline double triangles_area(std::span<const Vec3> vertices, std::span<const Tri> triangles) {
  double a = 0.0;
  for (const Tri& t : triangles) {
    const Vec3& p = vertices[static_cast<std::size_t>(t[0])];
    a += 0.5 * norm(cross(vertices[static_cast<std::size_t>(t[1])] - p, vertices[static_cast<std::size_t>(t[2])] - p));
  }
  return a;
}

namespace detail {

// Base-mesh vertex a point sits on exactly, or -1.
inline Index base_vertex_of(const SurfaceMesh& mesh, const SurfacePoint& p) {
  for (int i = 0; i < 3; ++i)
    if (p.bary[static_cast<std::size_t>(i)] == 1.0) return mesh.triangle(p.triangle)[static_cast<std::size_t>(i)];
  return -1;
}

inline double corner_angle(const Vec3& a, const Vec3& b, const Vec3& c) { return angle_between(a - b, c - b); }

inline double corner_angle(Index a, Index b, Index c, const std::vector<Vec3>& pos) {
  return corner_angle(pos[static_cast<std::size_t>(a)], pos[static_cast<std::size_t>(b)], pos[static_cast<std::size_t>(c)]);
}

// Barycentric tolerance below which a point counts as lying on a boundary
// edge of the base mesh.
inline constexpr double kBoundarySnap = 1e-9;

inline OutputMesh triangulate_planar(const SurfaceMesh& mesh, std::span<const GeneratedPoint> points, const Vec3& n) {
  const TangentFrame frame = make_frame(n);
  std::vector<Vec2> xy;
  xy.reserve(points.size());
  for (const GeneratedPoint& p : points) xy.push_back({dot(p.position, frame.t1), dot(p.position, frame.t2)});

  std::vector<Index> point_of(static_cast<std::size_t>(mesh.num_vertices()), -1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Index v = base_vertex_of(mesh, points[i].location);
    if (v >= 0 && point_of[static_cast<std::size_t>(v)] < 0) point_of[static_cast<std::size_t>(v)] = static_cast<Index>(i);
  }
  // Points on a boundary edge, keyed by the edge's start vertex, with their
  // parameter along the edge.
  std::unordered_map<Index, std::vector<std::pair<double, Index>>> on_edge;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SurfacePoint& loc = points[i].location;
    if (std::max({loc.bary[0], loc.bary[1], loc.bary[2]}) >= 1.0 - kBoundarySnap) continue;
    for (int e = 0; e < 3; ++e) {
      if (mesh.neighbor(loc.triangle, e) != kNoNeighbor || loc.bary[static_cast<std::size_t>(e)] > kBoundarySnap) continue;
      const Index from = mesh.triangle(loc.triangle)[static_cast<std::size_t>(next3(e))];
      const double s = loc.bary[static_cast<std::size_t>(prev3(e))];
      on_edge[from].push_back({s, static_cast<Index>(i)});
    }
  }
  std::vector<std::pair<Index, Index>> segments;
  for (const BoundaryLoop& loop : boundary_loops(mesh)) {
    const auto& vs = loop.vertices;
    const std::size_t m = loop.closed ? vs.size() : vs.size() - 1;
    for (std::size_t k = 0; k < m; ++k) {
      Index a = point_of[static_cast<std::size_t>(vs[k])];
      const Index b = point_of[static_cast<std::size_t>(vs[(k + 1) % vs.size()])];
      if (a < 0 || b < 0) throw AlgorithmError("boundary vertex missing from the point set");
      auto it = on_edge.find(vs[k]);
      if (it != on_edge.end()) {
        std::sort(it->second.begin(), it->second.end());
        for (const auto& [s, i] : it->second) {
          segments.push_back({a, i});
          a = i;
        }
      }
      segments.push_back({a, b});
    }
  }

  OutputMesh out;
  out.triangles = constrained_delaunay_2d(xy, segments);
  std::vector<char> used(points.size(), 0);
  for (const Tri& t : out.triangles)
    for (Index v : t) used[static_cast<std::size_t>(v)] = 1;
  for (char u : used)
    if (!u) throw AlgorithmError("a generated point lies outside the domain");
  for (const GeneratedPoint& p : points) {
    out.vertices.push_back(p.position);
    out.locations.push_back(p.location);
  }
  return out;
}

class SurfaceTriangulator {
 public:
  SurfaceTriangulator(const SurfaceMesh& mesh, std::span<const GeneratedPoint> points)
      : mesh_(mesh), points_(points), nv0_(mesh.num_vertices()) {
    std::vector<Index> tags(static_cast<std::size_t>(mesh.num_triangles()));
    for (Index t = 0; t < mesh.num_triangles(); ++t) tags[static_cast<std::size_t>(t)] = t;
    topo_ = TopoMesh(nv0_, mesh.triangles(), tags);
    pos_ = mesh.vertices();
    owned_.resize(static_cast<std::size_t>(mesh.num_triangles()));
    for (Index t = 0; t < mesh.num_triangles(); ++t) owned_[static_cast<std::size_t>(t)].push_back(t);
    claimed_.assign(static_cast<std::size_t>(nv0_), -1);
    vertex_of_point_.assign(points.size(), -1);
  }

  OutputMesh run(TriangulationStats& stats) {
    for (std::size_t i = 0; i < points_.size(); ++i) insert(static_cast<Index>(i));
    for (Index v = 0; v < nv0_; ++v) {
      if (claimed_[static_cast<std::size_t>(v)] >= 0) continue;
      if (!topo_.star_is_closed(v)) throw AlgorithmError("boundary vertex missing from the point set");
      remove_vertex(v);
      ++stats.removed_base_vertices;
    }
    stats.area_before_flips = area();
    flip_to_delaunay(stats);
    stats.area_after_flips = area();
    return collect();
  }

 private:
  static constexpr double kOnEdge = 1e-9;

  double area() const {
    double a = 0.0;
    for (Index f = 0; f < topo_.num_faces(); ++f)
      if (topo_.alive(f)) a += 0.5 * norm(cross(p(topo_.vertex(f, 1)) - p(topo_.vertex(f, 0)), p(topo_.vertex(f, 2)) - p(topo_.vertex(f, 0))));
    return a;
  }

  const Vec3& p(Index v) const { return pos_[static_cast<std::size_t>(v)]; }

  Bary bary_in(Index f, const Vec3& x) const {
    const Vec3 &a = p(topo_.vertex(f, 0)), &b = p(topo_.vertex(f, 1)), &c = p(topo_.vertex(f, 2));
    const Vec3 n = cross(b - a, c - a);
    const double nn = dot(n, n);
    const double l0 = dot(n, cross(c - b, x - b)) / nn;
    const double l1 = dot(n, cross(a - c, x - c)) / nn;
    return {l0, l1, 1.0 - l0 - l1};
  }

  void adopt(const std::vector<Index>& faces, Index tag) {
    for (Index f : faces) {
      topo_.face(f).tag = tag;
      if (tag >= 0) owned_[static_cast<std::size_t>(tag)].push_back(f);
    }
  }

  void insert(Index i) {
    const GeneratedPoint& g = points_[static_cast<std::size_t>(i)];
    const Index base = base_vertex_of(mesh_, g.location);
    if (base >= 0 && claimed_[static_cast<std::size_t>(base)] < 0) {
      claimed_[static_cast<std::size_t>(base)] = i;
      vertex_of_point_[static_cast<std::size_t>(i)] = base;
      return;
    }
    const Index owner = g.location.triangle;
    Index best = -1;
    Bary bb{};
    double best_min = -std::numeric_limits<double>::infinity();
    for (Index f : owned_[static_cast<std::size_t>(owner)]) {
      if (!topo_.alive(f) || topo_.face(f).tag != owner) continue;
      const Bary b = bary_in(f, g.position);
      const double m = std::min({b[0], b[1], b[2]});
      if (m > best_min) {
        best_min = m;
        best = f;
        bb = b;
      }
    }
    if (best < 0 || best_min < -kOnEdge) throw AlgorithmError("point could not be located in its base triangle");

    int small = 0, which = -1, big = -1;
    for (int k = 0; k < 3; ++k) {
      if (bb[static_cast<std::size_t>(k)] < kOnEdge) {
        ++small;
        which = k;
      } else {
        big = k;
      }
    }
    if (small >= 2) {
      const Index v = topo_.vertex(best, big);
      if (v < nv0_ && claimed_[static_cast<std::size_t>(v)] < 0) {
        claimed_[static_cast<std::size_t>(v)] = i;
        vertex_of_point_[static_cast<std::size_t>(i)] = v;
        pos_[static_cast<std::size_t>(v)] = g.position;
        return;
      }
      throw AlgorithmError("duplicate point in triangulation input");
    }

    const Index x = topo_.add_vertex();
    pos_.push_back(g.position);
    vertex_of_point_[static_cast<std::size_t>(i)] = x;
    if (small == 0) {
      const Tri t = topo_.face(best).v;
      const std::array<Index, 1> old{best};
      const std::array<Tri, 3> made{Tri{t[0], t[1], x}, Tri{t[1], t[2], x}, Tri{t[2], t[0], x}};
      adopt(topo_.replace(old, made), owner);
      return;
    }
    const Index q = topo_.vertex(best, which), u = topo_.edge_from(best, which), w = topo_.edge_to(best, which);
    const Index other = topo_.neighbor(best, which);
    if (other == kNoNeighbor) {
      const std::array<Index, 1> old{best};
      const std::array<Tri, 2> made{Tri{q, u, x}, Tri{q, x, w}};
      adopt(topo_.replace(old, made), owner);
      return;
    }
    const Index r = topo_.opposite(best, which);
    const Index other_tag = topo_.face(other).tag;
    const std::array<Index, 2> old{best, other};
    const std::array<Tri, 4> made{Tri{q, u, x}, Tri{q, x, w}, Tri{r, w, x}, Tri{r, x, u}};
    const auto faces = topo_.replace(old, made);
    adopt({faces[0], faces[1]}, owner);
    adopt({faces[2], faces[3]}, other_tag);
  }

  // Angle sums at the ends of edge e of f, as seen from both faces.
  std::pair<double, double> end_angles(Index f, int e) const {
    const Index q = topo_.vertex(f, e), u = topo_.edge_from(f, e), w = topo_.edge_to(f, e);
    const Index r = topo_.opposite(f, e);
    return {detail::corner_angle(q, u, w, pos_) + detail::corner_angle(w, u, r, pos_),
            detail::corner_angle(u, w, q, pos_) + detail::corner_angle(r, w, u, pos_)};
  }

  bool can_flip(Index f, int e) const {
    const Index g = topo_.neighbor(f, e);
    if (g == kNoNeighbor || topo_.is_locked(f, e)) return false;
    const Index q = topo_.vertex(f, e), r = topo_.opposite(f, e);
    if (q == r || topo_.has_edge(q, r)) return false;
    const auto [au, aw] = end_angles(f, e);
    return au < kPi - 1e-9 && aw < kPi - 1e-9;
  }

  // Ear clipping of the link polygon, projected on the plane of the star's
  // mean normal. Ears must be convex, empty and must not duplicate an edge.
  void remove_vertex(Index v) {
    const std::vector<Index> fan = topo_.star(v);
    if (fan.size() < 3) throw AlgorithmError("base vertex has a degenerate star");
    std::unordered_map<Index, Index> next;
    Vec3 n;
    for (Index f : fan) {
      const int i = topo_.index_of(f, v);
      next[topo_.vertex(f, next3(i))] = topo_.vertex(f, prev3(i));
      n += cross(p(topo_.vertex(f, 1)) - p(topo_.vertex(f, 0)), p(topo_.vertex(f, 2)) - p(topo_.vertex(f, 0)));
    }
    std::vector<Index> ring{next.begin()->first};
    while (ring.size() < fan.size()) {
      const auto it = next.find(ring.back());
      if (it == next.end() || it->second == ring.front()) break;
      ring.push_back(it->second);
    }
    if (ring.size() != fan.size() || next[ring.back()] != ring.front()) throw AlgorithmError("base vertex star is not a fan");

    const TangentFrame frame = make_frame(normalized(n));
    std::unordered_map<Index, Vec2> xy;
    for (Index r : ring) {
      const Vec3 d = p(r) - p(v);
      xy[r] = {dot(d, frame.t1), dot(d, frame.t2)};
    }
    std::vector<Tri> made;
    while (ring.size() > 3) {
      const std::size_t m = ring.size();
      std::size_t best = m;
      double best_score = -1.0;
      for (std::size_t k = 0; k < m; ++k) {
        const Index a = ring[(k + m - 1) % m], b = ring[k], c = ring[(k + 1) % m];
        if (orient2d(xy[a], xy[b], xy[c]) <= 0.0 || topo_.has_edge(a, c)) continue;
        bool empty = true;
        for (Index o : ring) {
          if (o == a || o == b || o == c) continue;
          if (orient2d(xy[a], xy[b], xy[o]) >= 0.0 && orient2d(xy[b], xy[c], xy[o]) >= 0.0 &&
              orient2d(xy[c], xy[a], xy[o]) >= 0.0) {
            empty = false;
            break;
          }
        }
        if (!empty) continue;
        const double score = std::min({detail::corner_angle(c, a, b, pos_), detail::corner_angle(a, b, c, pos_),
                                       detail::corner_angle(b, c, a, pos_)});
        if (score > best_score) {
          best_score = score;
          best = k;
        }
      }
      if (best == m) throw AlgorithmError("no valid ear to remove a base vertex");
      made.push_back({ring[(best + m - 1) % m], ring[best], ring[(best + 1) % m]});
      ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(best));
    }
    made.push_back({ring[0], ring[1], ring[2]});
    topo_.replace(fan, made);
  }

  void flip_to_delaunay(TriangulationStats& stats) {
    constexpr int kMaxSweeps = 50;
    stats.flips_converged = false;
    for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
      stats.flip_sweeps = sweep;
      std::size_t flips = 0;
      for (Index f = 0; f < topo_.num_faces(); ++f) {
        if (!topo_.alive(f)) continue;
        for (int e = 0; e < 3; ++e) {
          const Index g = topo_.neighbor(f, e);
          if (g == kNoNeighbor || g < f) continue;
          const Index q = topo_.vertex(f, e), u = topo_.edge_from(f, e), w = topo_.edge_to(f, e);
          const Index r = topo_.opposite(f, e);
          const double opposite_sum = detail::corner_angle(u, q, w, pos_) + detail::corner_angle(w, r, u, pos_);
          if (opposite_sum <= kPi + 1e-12 || !can_flip(f, e)) continue;
          topo_.flip(f, e);
          ++flips;
          break;  // f was replaced
        }
      }
      stats.flips += flips;
      if (flips == 0) {
        stats.flips_converged = true;
        return;
      }
    }
  }

  OutputMesh collect() const {
    OutputMesh out;
    std::vector<Index> out_index(pos_.size(), -1);
    for (std::size_t i = 0; i < points_.size(); ++i) {
      out_index[static_cast<std::size_t>(vertex_of_point_[i])] = static_cast<Index>(i);
      out.vertices.push_back(points_[i].position);
      out.locations.push_back(points_[i].location);
    }
    for (Index f = 0; f < topo_.num_faces(); ++f) {
      if (!topo_.alive(f)) continue;
      Tri t{};
      for (int k = 0; k < 3; ++k) {
        t[static_cast<std::size_t>(k)] = out_index[static_cast<std::size_t>(topo_.vertex(f, k))];
        if (t[static_cast<std::size_t>(k)] < 0) throw AlgorithmError("a base vertex survived the retriangulation");
      }
      out.triangles.push_back(t);
    }
    return out;
  }

  const SurfaceMesh& mesh_;
  std::span<const GeneratedPoint> points_;
  Index nv0_;
  TopoMesh topo_;
  std::vector<Vec3> pos_;
  std::vector<std::vector<Index>> owned_;
  std::vector<Index> claimed_;
  std::vector<Index> vertex_of_point_;
};

}  // namespace detail

/// Triangulates the generated points. Planar base meshes get a constrained
/// Delaunay triangulation bounded by the base boundary loops; curved ones are
/// built by splitting the base triangles at the points, removing the
/// remaining base vertices and flipping to the intrinsic Delaunay criterion
/// (at most 50 sweeps).
inline OutputMesh triangulate(const SurfaceMesh& mesh, std::span<const GeneratedPoint> points,
                              TriangulationStats* stats = nullptr) {
  TriangulationStats local;
  TriangulationStats& st = stats ? *stats : local;
  st = {};
  for (const GeneratedPoint& g : points)
    if (!is_valid(mesh, g.location)) throw AlgorithmError("a generated point is not on the base mesh");
  if (const auto n = plane_normal(mesh)) {
    st.planar = true;
    OutputMesh out = detail::triangulate_planar(mesh, points, *n);
    st.area_before_flips = st.area_after_flips = triangles_area(out.vertices, out.triangles);
    return out;
  }
  detail::SurfaceTriangulator tri(mesh, points);
  return tri.run(st);
}

}  // namespace frontmesh
