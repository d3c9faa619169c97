#pragma once

// Right-angled triangle quality with respect to a cross field, radius ratio,
// and cavity relocation driven by the right-angled quality.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "frontmesh/direction_field.hpp"
#include "frontmesh/triangulator.hpp"

namespace frontmesh {

/// 1 - |pi/2 - theta| / (pi/2).
inline double q_angle(double theta) { return 1.0 - std::fabs(kPi / 2 - theta) / (kPi / 2); }

/// Best alignment of either edge with either field direction:
/// max |cos 2t| over the four edge/direction angles. Inputs are unit vectors.
inline double q_alignment(const Vec3& e1, const Vec3& e2, const Vec3& d1, const Vec3& d2) {
  double best = 0.0;
  for (const Vec3* e : {&e1, &e2})
    for (const Vec3* d : {&d1, &d2}) {
      const double c = std::clamp(dot(*e, *d), -1.0, 1.0);
      best = std::max(best, std::fabs(2.0 * c * c - 1.0));
    }
  return best;
}

/// 1 - |e1 - e2| / max(e1, e2).
inline double q_edge_ratio(double e1, double e2) { return 1.0 - std::fabs(e1 - e2) / std::max(e1, e2); }

struct TriangleQuality {
  std::array<double, 3> qa{}, qb{}, qc{};
  double qt = 0.0;
};

/// Per-vertex field directions used by the right-angled quality: d1 and its
/// quarter turn d2 about the normal n.
struct CrossDirs {
  Vec3 d1, d2, n;
};

inline CrossDirs cross_dirs(const DirectionField& field, const SurfaceMesh& mesh, const SurfacePoint& p) {
  const Directions d = sample_directions(field, mesh, p);
  return {d.dirs[0], cross(d.normal, d.dirs[0]), d.normal};
}

/// Right-angled quality of the triangle (x0, x1, x2); dirs[i] is the field
/// at corner i. Edges are projected onto the tangent plane of that corner.
inline TriangleQuality right_angled_quality(const std::array<Vec3, 3>& x, const std::array<CrossDirs, 3>& dirs) {
  if (norm2(cross(x[1] - x[0], x[2] - x[0])) == 0.0) throw AlgorithmError("degenerate triangle");
  TriangleQuality q;
  for (int i = 0; i < 3; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const Vec3 a = x[static_cast<std::size_t>(next3(i))] - x[k];
    const Vec3 b = x[static_cast<std::size_t>(prev3(i))] - x[k];
    const Vec3& n = dirs[k].n;
    const Vec3 ta = normalized(a - dot(a, n) * n), tb = normalized(b - dot(b, n) * n);
    q.qa[k] = q_angle(angle_between(a, b));
    q.qb[k] = q_alignment(ta, tb, dirs[k].d1, dirs[k].d2);
    q.qc[k] = q_edge_ratio(norm(a), norm(b));
    q.qt = std::max(q.qt, q.qa[k] * q.qb[k] * q.qc[k]);
  }
  return q;
}

/// Right-angled quality of output triangle t, with the field sampled at each
/// vertex's location on the base mesh.
inline TriangleQuality right_angled_quality(const OutputMesh& out, Index t, const DirectionField& field,
                                            const SurfaceMesh& base) {
  const Tri& tri = out.triangles[static_cast<std::size_t>(t)];
  std::array<Vec3, 3> x;
  std::array<CrossDirs, 3> d;
  for (std::size_t i = 0; i < 3; ++i) {
    x[i] = out.vertices[static_cast<std::size_t>(tri[i])];
    d[i] = cross_dirs(field, base, out.locations[static_cast<std::size_t>(tri[i])]);
  }
  return right_angled_quality(x, d);
}

/// 2 r_in / r_circ, written as (b+c-a)(c+a-b)(a+b-c) / (abc).
inline double radius_ratio(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
  const double a = distance(p1, p2), b = distance(p2, p0), c = distance(p0, p1);
  const double g = (b + c - a) * (c + a - b) * (a + b - c) / (a * b * c);
  if (!(g > 0.0) || norm2(cross(p1 - p0, p2 - p0)) == 0.0) throw AlgorithmError("degenerate triangle");
  return std::min(g, 1.0);
}

enum class CavityCenter { LinfBox, Arithmetic };

struct OptimizeOptions {
  int max_sweeps = 20;
  int samples = 17;  // along the segment, endpoints included
  CavityCenter center = CavityCenter::LinfBox;
};

struct Relocation {
  Index vertex = 0;
  int sweep = 0;
  double before = 0.0;  // min q_t over the cavity
  double after = 0.0;
  Vec3 position;         // new position
  SurfacePoint location;
};

struct OptimizeReport {
  int sweeps = 0;
  bool converged = false;
  std::vector<Relocation> relocations;
};

namespace detail {

class CavityOptimizer {
 public:
  CavityOptimizer(OutputMesh& out, const DirectionField& field, const SurfaceMesh& base, const OptimizeOptions& opt)
      : out_(out), field_(field), base_(base), opt_(opt) {
    const SurfaceMesh topo(out.vertices, out.triangles);
    const auto nv = static_cast<std::size_t>(topo.num_vertices());
    star_.resize(nv);
    link_.resize(nv);
    interior_.resize(nv);
    dirs_.resize(nv);
    for (Index v = 0; v < topo.num_vertices(); ++v) {
      const auto k = static_cast<std::size_t>(v);
      interior_[k] = !topo.is_boundary_vertex(v) && !topo.vertex_triangles(v).empty();
      star_[k].assign(topo.vertex_triangles(v).begin(), topo.vertex_triangles(v).end());
      link_[k].assign(topo.vertex_neighbors(v).begin(), topo.vertex_neighbors(v).end());
      dirs_[k] = cross_dirs(field, base, out.locations[k]);
    }
  }

  OptimizeReport run() {
    OptimizeReport report;
    for (int sweep = 1; sweep <= opt_.max_sweeps; ++sweep) {
      report.sweeps = sweep;
      bool moved = false;
      for (Index v = 0; v < static_cast<Index>(out_.vertices.size()); ++v) {
        if (!interior_[static_cast<std::size_t>(v)]) continue;
        Relocation r;
        if (relocate(v, r)) {
          r.sweep = sweep;
          report.relocations.push_back(r);
          moved = true;
        }
      }
      if (!moved) {
        report.converged = true;
        return report;
      }
    }
    return report;
  }

  // Min q_t over the cavity of v, or -1 if a triangle is inverted.
  double cavity_quality(Index v, const Vec3& x, const CrossDirs& dv) const {
    double m = 1.0;
    for (Index t : star_[static_cast<std::size_t>(v)]) {
      const Tri& tri = out_.triangles[static_cast<std::size_t>(t)];
      std::array<Vec3, 3> p;
      std::array<CrossDirs, 3> d;
      for (std::size_t i = 0; i < 3; ++i) {
        const bool self = tri[i] == v;
        p[i] = self ? x : out_.vertices[static_cast<std::size_t>(tri[i])];
        d[i] = self ? dv : dirs_[static_cast<std::size_t>(tri[i])];
      }
      if (!(dot(cross(p[1] - p[0], p[2] - p[0]), dv.n) > 0.0)) return -1.0;
      m = std::min(m, right_angled_quality(p, d).qt);
    }
    return m;
  }

 private:
  Vec3 target(Index v) const {
    const auto& link = link_[static_cast<std::size_t>(v)];
    const Vec3& c = out_.vertices[static_cast<std::size_t>(v)];
    if (opt_.center == CavityCenter::Arithmetic) {
      Vec3 s;
      for (Index w : link) s += out_.vertices[static_cast<std::size_t>(w)];
      return s / static_cast<double>(link.size());
    }
    const CrossDirs& d = dirs_[static_cast<std::size_t>(v)];
    double lo1 = std::numeric_limits<double>::infinity(), hi1 = -lo1, lo2 = lo1, hi2 = -lo1;
    for (Index w : link) {
      const Vec3 r = out_.vertices[static_cast<std::size_t>(w)] - c;
      lo1 = std::min(lo1, dot(r, d.d1));
      hi1 = std::max(hi1, dot(r, d.d1));
      lo2 = std::min(lo2, dot(r, d.d2));
      hi2 = std::max(hi2, dot(r, d.d2));
    }
    return c + (0.5 * (lo1 + hi1)) * d.d1 + (0.5 * (lo2 + hi2)) * d.d2;
  }

  bool relocate(Index v, Relocation& r) {
    const auto k = static_cast<std::size_t>(v);
    const Vec3 x0 = out_.vertices[k];
    const double q0 = cavity_quality(v, x0, dirs_[k]);
    const Vec3 x1 = target(v);
    double best = q0;
    SurfacePoint best_loc{};
    Vec3 best_x;
    CrossDirs best_d{};
    for (int s = 1; s < opt_.samples; ++s) {
      const double t = static_cast<double>(s) / (opt_.samples - 1);
      const Vec3 guess = x0 + t * (x1 - x0);
      const SurfacePoint loc = locate_walk(base_, out_.locations[k].triangle, guess);
      const Vec3 x = position_of(base_, loc);
      const CrossDirs d = cross_dirs(field_, base_, loc);
      const double q = cavity_quality(v, x, d);
      if (q > best) {
        best = q;
        best_loc = loc;
        best_x = x;
        best_d = d;
      }
    }
    if (!(best > q0 + 1e-12)) return false;
    out_.vertices[k] = best_x;
    out_.locations[k] = best_loc;
    dirs_[k] = best_d;
    r.vertex = v;
    r.before = q0;
    r.after = best;
    r.position = best_x;
    r.location = best_loc;
    return true;
  }

  OutputMesh& out_;
  const DirectionField& field_;
  const SurfaceMesh& base_;
  OptimizeOptions opt_;
  std::vector<std::vector<Index>> star_, link_;
  std::vector<char> interior_;
  std::vector<CrossDirs> dirs_;
};

}  // namespace detail

/// Moves each interior vertex along the segment towards its cavity centre to
/// the sample maximising the cavity's minimum q_t, if that strictly improves
/// it. Sweeps until nothing moves or the sweep cap. Boundary vertices stay.
inline OptimizeReport optimize_cavities(OutputMesh& out, const DirectionField& field, const SurfaceMesh& base,
                                        const OptimizeOptions& options = {}) {
  if (options.samples < 2) throw ConfigError("optimization needs at least 2 samples");
  if (options.max_sweeps < 0) throw ConfigError("sweep count must be non-negative");
  if (out.triangles.empty()) return {0, true, {}};
  detail::CavityOptimizer opt(out, field, base, options);
  return opt.run();
}

/// Minimum q_t over the triangles incident to v.
inline double cavity_min_quality(const OutputMesh& out, Index v, const DirectionField& field, const SurfaceMesh& base) {
  double m = 1.0;
  for (Index t = 0; t < static_cast<Index>(out.triangles.size()); ++t) {
    const Tri& tri = out.triangles[static_cast<std::size_t>(t)];
    if (tri[0] == v || tri[1] == v || tri[2] == v) m = std::min(m, right_angled_quality(out, t, field, base).qt);
  }
  return m;
}

}  // namespace frontmesh
