#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "frontmesh/errors.hpp"
#include "frontmesh/mesh_core.hpp"

namespace frontmesh::detail {

/// Editable triangle connectivity used by the triangulators. Same edge
/// convention as SurfaceMesh: edge i is opposite v[i]. Locked edges are
/// never flipped; the flag is kept on both sides of the edge.
class TopoMesh {
 public:
  struct Face {
    Tri v{};
    std::array<Index, 3> n{kNoNeighbor, kNoNeighbor, kNoNeighbor};
    std::array<bool, 3> locked{};
    Index tag = -1;
    bool alive = false;
  };

  TopoMesh() = default;

  /// Builds adjacency from consistently oriented triangles.
  TopoMesh(Index num_vertices, std::span<const Tri> triangles, std::span<const Index> tags = {}) {
    v2f_.assign(static_cast<std::size_t>(num_vertices), -1);
    std::unordered_map<std::uint64_t, std::pair<Index, int>> half;
    half.reserve(triangles.size() * 3);
    for (std::size_t k = 0; k < triangles.size(); ++k) {
      const Index f = add({triangles[k]}, tags.empty() ? -1 : tags[k]);
      for (int e = 0; e < 3; ++e) half.emplace(key(edge_from(f, e), edge_to(f, e)), std::pair{f, e});
    }
    for (Index f = 0; f < num_faces(); ++f)
      for (int e = 0; e < 3; ++e) {
        const auto it = half.find(key(edge_to(f, e), edge_from(f, e)));
        if (it != half.end()) face(f).n[static_cast<std::size_t>(e)] = it->second.first;
      }
  }

  Index num_faces() const { return static_cast<Index>(faces_.size()); }
  Index num_vertices() const { return static_cast<Index>(v2f_.size()); }
  Face& face(Index f) { return faces_[static_cast<std::size_t>(f)]; }
  const Face& face(Index f) const { return faces_[static_cast<std::size_t>(f)]; }
  bool alive(Index f) const { return face(f).alive; }

  Index vertex(Index f, int i) const { return face(f).v[static_cast<std::size_t>(i)]; }
  Index neighbor(Index f, int e) const { return face(f).n[static_cast<std::size_t>(e)]; }
  Index edge_from(Index f, int e) const { return vertex(f, next3(e)); }
  Index edge_to(Index f, int e) const { return vertex(f, prev3(e)); }
  bool is_locked(Index f, int e) const { return face(f).locked[static_cast<std::size_t>(e)]; }

  int index_of(Index f, Index v) const {
    for (int i = 0; i < 3; ++i)
      if (vertex(f, i) == v) return i;
    return -1;
  }

  Index add_vertex() {
    v2f_.push_back(-1);
    return num_vertices() - 1;
  }

  Index incident_face(Index v) const { return v2f_[static_cast<std::size_t>(v)]; }

  void lock(Index f, int e) {
    face(f).locked[static_cast<std::size_t>(e)] = true;
    const Index g = neighbor(f, e);
    if (g != kNoNeighbor) face(g).locked[static_cast<std::size_t>(edge_index(g, edge_to(f, e), edge_from(f, e)))] = true;
  }

  /// Edge index of the directed edge a -> b in f, or -1.
  int edge_index(Index f, Index a, Index b) const {
    for (int e = 0; e < 3; ++e)
      if (edge_from(f, e) == a && edge_to(f, e) == b) return e;
    return -1;
  }

  /// Faces around v. Closed fans come back to the start; open fans are
  /// walked in both directions.
  std::vector<Index> star(Index v) const {
    std::vector<Index> out;
    const Index f0 = incident_face(v);
    if (f0 < 0) return out;
    out.push_back(f0);
    Index f = f0;
    for (;;) {
      const Index g = neighbor(f, prev3(index_of(f, v)));
      if (g == kNoNeighbor) break;
      if (g == f0) return out;
      out.push_back(g);
      f = g;
    }
    f = f0;
    for (;;) {
      const Index g = neighbor(f, next3(index_of(f, v)));
      if (g == kNoNeighbor) break;
      out.push_back(g);
      f = g;
    }
    return out;
  }

  bool star_is_closed(Index v) const {
    const Index f0 = incident_face(v);
    Index f = f0;
    do {
      f = neighbor(f, prev3(index_of(f, v)));
      if (f == kNoNeighbor) return false;
    } while (f != f0);
    return true;
  }

  /// A face holding the undirected edge {a, b} and the edge's index there.
  std::optional<std::pair<Index, int>> find_edge(Index a, Index b) const {
    for (Index f : star(a)) {
      const int i = index_of(f, a);
      if (vertex(f, next3(i)) == b) return std::pair{f, prev3(i)};
      if (vertex(f, prev3(i)) == b) return std::pair{f, next3(i)};
    }
    return std::nullopt;
  }

  bool has_edge(Index a, Index b) const { return find_edge(a, b).has_value(); }

  /// Replaces the faces `removed` by `added`. The outer boundary of the
  /// removed region must equal the outer boundary of the added faces.
  /// Returns the indices of the new faces, in order.
  std::vector<Index> replace(std::span<const Index> removed, std::span<const Tri> added, Index tag = -1) {
    struct Outer {
      Index from, to, nb;
      bool locked;
    };
    std::vector<Outer> outer;
    for (Index f : removed)
      for (int e = 0; e < 3; ++e) {
        const Index nb = neighbor(f, e);
        if (nb != kNoNeighbor && std::find(removed.begin(), removed.end(), nb) != removed.end()) continue;
        outer.push_back({edge_from(f, e), edge_to(f, e), nb, is_locked(f, e)});
      }
    for (Index f : removed) {
      face(f).alive = false;
      free_.push_back(f);
    }
    std::vector<Index> made;
    made.reserve(added.size());
    for (const Tri& t : added) made.push_back(add(t, tag));

    std::size_t matched = 0;
    for (Index f : made)
      for (int e = 0; e < 3; ++e) {
        const Index a = edge_from(f, e), b = edge_to(f, e);
        Index inner = kNoNeighbor;
        for (Index g : made) {
          if (g == f) continue;
          const int ge = edge_index(g, b, a);
          if (ge >= 0) {
            inner = g;
            break;
          }
        }
        if (inner != kNoNeighbor) {
          face(f).n[static_cast<std::size_t>(e)] = inner;
          continue;
        }
        auto it = std::find_if(outer.begin(), outer.end(), [&](const Outer& o) { return o.from == a && o.to == b; });
        if (it == outer.end()) throw AlgorithmError("local retriangulation does not close its boundary");
        ++matched;
        face(f).n[static_cast<std::size_t>(e)] = it->nb;
        face(f).locked[static_cast<std::size_t>(e)] = it->locked;
        if (it->nb != kNoNeighbor) {
          Face& g = face(it->nb);
          const int ge = edge_index(it->nb, b, a);
          g.n[static_cast<std::size_t>(ge)] = f;
        }
      }
    if (matched != outer.size()) throw AlgorithmError("local retriangulation does not close its boundary");
    return made;
  }

  /// Flips edge e of f; returns the two new faces (the first holds the
  /// former opposite vertex of f).
  std::array<Index, 2> flip(Index f, int e) {
    const Index g = neighbor(f, e);
    const Index q = vertex(f, e), u = edge_from(f, e), w = edge_to(f, e);
    const Index r = vertex(g, edge_index(g, w, u));
    const std::array<Index, 2> old{f, g};
    const std::array<Tri, 2> made{Tri{q, u, r}, Tri{q, r, w}};
    const Index tag = face(f).tag;
    const auto out = replace(old, made, tag);
    return {out[0], out[1]};
  }

  /// Opposite vertex across edge e of f.
  Index opposite(Index f, int e) const {
    const Index g = neighbor(f, e);
    return vertex(g, edge_index(g, edge_to(f, e), edge_from(f, e)));
  }

 private:
  static std::uint64_t key(Index a, Index b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
  }

  Index add(const Tri& t, Index tag) {
    Index f;
    if (!free_.empty()) {
      f = free_.back();
      free_.pop_back();
    } else {
      f = num_faces();
      faces_.emplace_back();
    }
    Face& face_ref = face(f);
    face_ref = Face{};
    face_ref.v = t;
    face_ref.tag = tag;
    face_ref.alive = true;
    for (Index v : t) v2f_[static_cast<std::size_t>(v)] = f;
    return f;
  }

  std::vector<Face> faces_;
  std::vector<Index> v2f_;
  std::vector<Index> free_;
};

}  // namespace frontmesh::detail
