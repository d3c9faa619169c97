#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <span>
#include <utility>
#include <vector>

#include "frontmesh/errors.hpp"
#include "frontmesh/hilbert.hpp"
#include "frontmesh/predicates.hpp"
#include "frontmesh/topo_mesh.hpp"

namespace frontmesh {

namespace detail {

/// Incremental constrained Delaunay triangulation in the plane.
/// Bowyer-Watson insertion inside a large enclosing triangle, constraint
/// recovery by edge flips, exterior removal by crossing parity.
class Cdt2 {
 public:
  explicit Cdt2(std::span<const Vec2> points) : p_(points.begin(), points.end()), n_(static_cast<Index>(points.size())) {
    if (points.empty()) return;
    Vec2 lo = points[0], hi = points[0];
    for (const Vec2& q : points) {
      lo = {std::min(lo.x, q.x), std::min(lo.y, q.y)};
      hi = {std::max(hi.x, q.x), std::max(hi.y, q.y)};
    }
    const double span = std::max({hi.x - lo.x, hi.y - lo.y, 1e-300});
    const Vec2 c{0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
    const double big = 1e4 * span;
    p_.push_back({c.x - big, c.y - big});
    p_.push_back({c.x + big, c.y - big});
    p_.push_back({c.x, c.y + big});
    const std::array<Tri, 1> super{Tri{n_, n_ + 1, n_ + 2}};
    mesh_ = TopoMesh(n_ + 3, super);

    std::vector<std::pair<std::uint64_t, Index>> order;
    order.reserve(points.size());
    for (Index i = 0; i < n_; ++i)
      order.emplace_back(hilbert_index(Vec3{p_[static_cast<std::size_t>(i)].x, p_[static_cast<std::size_t>(i)].y, 0.0},
                                       Vec3{lo.x, lo.y, 0.0}, Vec3{hi.x, hi.y, 0.0}),
                         i);
    std::sort(order.begin(), order.end());
    hint_ = 0;
    mark_.assign(static_cast<std::size_t>(mesh_.num_faces()), 0);
    for (const auto& item : order) insert(item.second);
  }

  const Vec2& point(Index v) const { return p_[static_cast<std::size_t>(v)]; }

  /// Forces the segment a-b into the triangulation, splitting it at any
  /// input point lying exactly on it.
  void insert_constraint(Index a, Index b) {
    if (a == b) return;
    std::vector<std::pair<Index, Index>> todo{{a, b}};
    while (!todo.empty()) {
      const auto [s, t] = todo.back();
      todo.pop_back();
      const Index split = recover(s, t);
      if (split >= 0) {
        todo.push_back({split, t});
        todo.push_back({s, split});
      }
    }
  }

  /// Keeps the faces separated from the enclosing triangle by an odd number
  /// of constrained edges.
  void remove_exterior() {
    std::vector<int> depth(static_cast<std::size_t>(mesh_.num_faces()), -1);
    std::deque<Index> queue;
    for (Index f = 0; f < mesh_.num_faces(); ++f)
      if (mesh_.alive(f) && touches_super(f)) {
        depth[static_cast<std::size_t>(f)] = 0;
        queue.push_back(f);
      }
    while (!queue.empty()) {
      const Index f = queue.front();
      queue.pop_front();
      for (int e = 0; e < 3; ++e) {
        const Index g = mesh_.neighbor(f, e);
        if (g == kNoNeighbor) continue;
        const int d = depth[static_cast<std::size_t>(f)] + (mesh_.is_locked(f, e) ? 1 : 0);
        int& dg = depth[static_cast<std::size_t>(g)];
        if (dg >= 0 && dg <= d) continue;
        dg = d;
        if (mesh_.is_locked(f, e))
          queue.push_back(g);
        else
          queue.push_front(g);
      }
    }
    inside_.assign(static_cast<std::size_t>(mesh_.num_faces()), 0);
    for (Index f = 0; f < mesh_.num_faces(); ++f)
      if (mesh_.alive(f) && depth[static_cast<std::size_t>(f)] % 2 == 1) inside_[static_cast<std::size_t>(f)] = 1;
  }

  /// Lawson flips until every unconstrained edge between kept faces is
  /// locally Delaunay.
  void make_delaunay() {
    std::vector<std::pair<Index, int>> stack;
    for (Index f = 0; f < mesh_.num_faces(); ++f)
      if (kept(f))
        for (int e = 0; e < 3; ++e) stack.push_back({f, e});
    while (!stack.empty()) {
      const auto [f, e] = stack.back();
      stack.pop_back();
      if (!kept(f) || mesh_.is_locked(f, e)) continue;
      const Index g = mesh_.neighbor(f, e);
      if (g == kNoNeighbor || !kept(g)) continue;
      const Index r = mesh_.opposite(f, e);
      if (!(incircle(point(mesh_.vertex(f, 0)), point(mesh_.vertex(f, 1)), point(mesh_.vertex(f, 2)), point(r)) > 0))
        continue;
      const auto made = mesh_.flip(f, e);
      for (Index m : made) {
        set_inside(m, true);
        for (int k = 0; k < 3; ++k) stack.push_back({m, k});
      }
    }
  }

  /// Kept faces as point-index triples (counter-clockwise).
  std::vector<Tri> triangles() const {
    std::vector<Tri> out;
    for (Index f = 0; f < mesh_.num_faces(); ++f)
      if (kept(f)) out.push_back(mesh_.face(f).v);
    return out;
  }

 private:
  bool touches_super(Index f) const {
    for (int i = 0; i < 3; ++i)
      if (mesh_.vertex(f, i) >= n_) return true;
    return false;
  }

  bool kept(Index f) const {
    if (!mesh_.alive(f)) return false;
    if (inside_.empty()) return !touches_super(f);
    return static_cast<std::size_t>(f) < inside_.size() && inside_[static_cast<std::size_t>(f)];
  }

  void set_inside(Index f, bool v) {
    if (inside_.empty()) return;
    if (inside_.size() <= static_cast<std::size_t>(f)) inside_.resize(static_cast<std::size_t>(f) + 1, 0);
    inside_[static_cast<std::size_t>(f)] = v ? 1 : 0;
  }

  double orient(Index a, Index b, Index c) const { return orient2d(point(a), point(b), point(c)); }

  Index locate(const Vec2& q) const {
    Index f = hint_;
    for (std::size_t steps = 0;; ++steps) {
      if (steps > static_cast<std::size_t>(4 * mesh_.num_faces() + 16)) throw AlgorithmError("point location did not terminate");
      int exit = -1;
      for (int e = 0; e < 3; ++e)
        if (orient2d(point(mesh_.edge_from(f, e)), point(mesh_.edge_to(f, e)), q) < 0) {
          exit = e;
          break;
        }
      if (exit < 0) return f;
      f = mesh_.neighbor(f, exit);
      if (f == kNoNeighbor) throw AlgorithmError("point lies outside the enclosing triangle");
    }
  }

  void insert(Index v) {
    const Vec2& q = point(v);
    const Index start = locate(q);
    for (int i = 0; i < 3; ++i)
      if (point(mesh_.vertex(start, i)) == q) throw AlgorithmError("duplicate point in triangulation input");

    if (mark_.size() < static_cast<std::size_t>(mesh_.num_faces())) mark_.resize(static_cast<std::size_t>(mesh_.num_faces()), 0);
    ++stamp_;
    std::vector<Index> cavity{start};
    mark_[static_cast<std::size_t>(start)] = stamp_;
    for (std::size_t k = 0; k < cavity.size(); ++k) {
      const Index f = cavity[k];
      for (int e = 0; e < 3; ++e) {
        const Index g = mesh_.neighbor(f, e);
        if (g == kNoNeighbor || mark_[static_cast<std::size_t>(g)] == stamp_) continue;
        if (incircle(point(mesh_.vertex(g, 0)), point(mesh_.vertex(g, 1)), point(mesh_.vertex(g, 2)), q) > 0) {
          mark_[static_cast<std::size_t>(g)] = stamp_;
          cavity.push_back(g);
        }
      }
    }
    std::vector<Tri> fan;
    for (Index f : cavity)
      for (int e = 0; e < 3; ++e) {
        const Index g = mesh_.neighbor(f, e);
        if (g != kNoNeighbor && mark_[static_cast<std::size_t>(g)] == stamp_) continue;
        fan.push_back({mesh_.edge_from(f, e), mesh_.edge_to(f, e), v});
      }
    const auto made = mesh_.replace(cavity, fan);
    hint_ = made.front();
  }

  // Recovers segment a-b. Returns a point found exactly on the open segment
  // (the caller splits there), or -1 when the edge is in place.
  Index recover(Index a, Index b) {
    if (auto e = mesh_.find_edge(a, b)) {
      mesh_.lock(e->first, e->second);
      return -1;
    }
    const Vec2 pa = point(a), pb = point(b);
    auto on_segment = [&](Index x) {
      const Vec2 px = point(x);
      return orient2d(pa, pb, px) == 0 && dot(px - pa, pb - pa) > 0 && dot(px - pb, pa - pb) > 0;
    };

    // First crossing edge: the face around a whose opposite edge straddles a-b.
    std::vector<std::pair<Index, Index>> crossing;
    Index f = kNoNeighbor, left = -1, right = -1;
    for (Index s : mesh_.star(a)) {
      const int i = mesh_.index_of(s, a);
      const Index u = mesh_.vertex(s, next3(i)), w = mesh_.vertex(s, prev3(i));
      if (on_segment(u)) return u;
      if (on_segment(w)) return w;
      if (orient(a, b, u) < 0 && orient(a, b, w) > 0) {
        f = s;
        right = u;
        left = w;
      }
    }
    if (f == kNoNeighbor) throw AlgorithmError("constraint recovery failed to leave its start vertex");
    for (;;) {
      crossing.push_back({right, left});
      const int e = mesh_.edge_index(f, right, left);
      const Index g = mesh_.neighbor(f, e);
      if (g == kNoNeighbor) throw AlgorithmError("constraint leaves the triangulation");
      const Index x = mesh_.opposite(f, e);
      if (x == b) break;
      if (on_segment(x)) return x;
      if (orient(a, b, x) < 0)
        right = x;
      else
        left = x;
      f = g;
    }

    std::deque<std::pair<Index, Index>> queue(crossing.begin(), crossing.end());
    std::size_t stall = 0;
    while (!queue.empty()) {
      const auto [u, w] = queue.front();
      queue.pop_front();
      const auto where = mesh_.find_edge(u, w);
      if (!where) throw AlgorithmError("constraint recovery lost an edge");
      const auto [ef, ee] = *where;
      const Index q = mesh_.vertex(ef, ee), r = mesh_.opposite(ef, ee);
      const double ou = orient(q, r, u), ow = orient(q, r, w);
      if (!((ou < 0 && ow > 0) || (ou > 0 && ow < 0))) {
        queue.push_back({u, w});
        if (++stall > 4 * queue.size() + 64) throw AlgorithmError("constraint recovery stalled");
        continue;
      }
      stall = 0;
      mesh_.flip(ef, ee);
      const double oq = orient(a, b, q), orr = orient(a, b, r);
      if (q != a && q != b && r != a && r != b && ((oq < 0 && orr > 0) || (oq > 0 && orr < 0))) queue.push_back({q, r});
    }
    const auto e = mesh_.find_edge(a, b);
    if (!e) throw AlgorithmError("constraint recovery did not produce the edge");
    mesh_.lock(e->first, e->second);
    return -1;
  }

  std::vector<Vec2> p_;
  Index n_ = 0;
  TopoMesh mesh_;
  Index hint_ = 0;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
  std::vector<char> inside_;
};

}  // namespace detail

/// Delaunay triangulation of a planar point set (counter-clockwise index
/// triples). Collinear inputs give an empty result.
inline std::vector<Tri> delaunay_2d(std::span<const Vec2> points) {
  if (points.size() < 3) return {};
  // Convex hull (monotone chain); its edges are Delaunay edges.
  std::vector<Index> idx(points.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Index>(i);
  auto at = [&](Index i) { return points[static_cast<std::size_t>(i)]; };
  std::sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    return at(a).x < at(b).x || (at(a).x == at(b).x && at(a).y < at(b).y);
  });
  std::vector<Index> hull(2 * idx.size());
  std::size_t k = 0;
  for (Index i : idx) {
    while (k >= 2 && orient2d(at(hull[k - 2]), at(hull[k - 1]), at(i)) <= 0) --k;
    hull[k++] = i;
  }
  for (std::size_t j = idx.size() - 1, lower = k + 1; j-- > 0;) {
    while (k >= lower && orient2d(at(hull[k - 2]), at(hull[k - 1]), at(idx[j])) <= 0) --k;
    hull[k++] = idx[j];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) return {};

  detail::Cdt2 cdt(points);
  for (std::size_t h = 0; h < hull.size(); ++h) cdt.insert_constraint(hull[h], hull[(h + 1) % hull.size()]);
  cdt.remove_exterior();
  cdt.make_delaunay();
  return cdt.triangles();
}

/// Constrained Delaunay triangulation of the region enclosed by `segments`
/// (closed loops; regions nested an even number of times are holes).
inline std::vector<Tri> constrained_delaunay_2d(std::span<const Vec2> points,
                                                std::span<const std::pair<Index, Index>> segments) {
  if (points.size() < 3) return {};
  for (const auto& [a, b] : segments)
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= points.size() || static_cast<std::size_t>(b) >= points.size())
      throw ConfigError("constraint segment references an invalid point");
  detail::Cdt2 cdt(points);
  for (const auto& [a, b] : segments) cdt.insert_constraint(a, b);
  cdt.remove_exterior();
  cdt.make_delaunay();
  return cdt.triangles();
}

}  // namespace frontmesh
