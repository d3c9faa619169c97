#pragma once

// N-fold symmetric direction fields stored per vertex. Each vertex carries a
// tangent frame (t1, t2, n) and an angle theta measured from t1. The field is
// solved on representation vectors u = (cos N theta, sin N theta), which are
// invariant under the N-fold symmetry.

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "frontmesh/mesh_core.hpp"

namespace frontmesh {

struct TangentFrame {
  Vec3 t1;
  Vec3 t2;
  Vec3 n;
};

/// Frame around unit normal `n`. t1 is the coordinate axis with the smallest
/// |component| of n, projected onto the tangent plane.
inline TangentFrame make_frame(const Vec3& n) {
  const double ax = std::fabs(n.x), ay = std::fabs(n.y), az = std::fabs(n.z);
  Vec3 axis{1.0, 0.0, 0.0};
  if (ay < ax && ay <= az)
    axis = {0.0, 1.0, 0.0};
  else if (az < ax && az < ay)
    axis = {0.0, 0.0, 1.0};
  const Vec3 t1 = normalized(cross(n, cross(axis, n)));
  return {t1, cross(n, t1), n};
}

/// Area-weighted vertex normals.
inline std::vector<Vec3> vertex_normals(const SurfaceMesh& mesh) {
  std::vector<Vec3> normals(static_cast<std::size_t>(mesh.num_vertices()));
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const Vec3 a = mesh.area_vector(t);
    for (Index v : mesh.triangle(t)) normals[static_cast<std::size_t>(v)] += a;
  }
  for (Vec3& n : normals) n = normalized(n);
  return normals;
}

/// Angle of `dir` in `frame` after projection onto the tangent plane.
inline double angle_in_frame(const TangentFrame& frame, const Vec3& dir) {
  return std::atan2(dot(dir, frame.t2), dot(dir, frame.t1));
}

inline bool is_valid_order(int order) { return order == 4 || order == 6; }

class DirectionField {
 public:
  DirectionField() = default;

  /// Field with prescribed per-vertex angles; angles are reduced to their
  /// representative in [0, 2 pi / order).
  DirectionField(const SurfaceMesh& mesh, int order, std::vector<double> theta) : order_(order) {
    if (!is_valid_order(order)) throw ConfigError("direction field order must be 4 or 6");
    if (theta.size() != static_cast<std::size_t>(mesh.num_vertices()))
      throw ConfigError("direction field needs one angle per vertex");
    const auto normals = vertex_normals(mesh);
    frames_.reserve(normals.size());
    for (const Vec3& n : normals) frames_.push_back(make_frame(n));
    theta_ = std::move(theta);
    for (double& a : theta_) a = reduce(a);
  }

  int order() const { return order_; }
  double period() const { return 2.0 * kPi / order_; }
  std::span<const double> theta() const { return theta_; }
  double theta(Index v) const { return theta_[static_cast<std::size_t>(v)]; }
  const TangentFrame& frame(Index v) const { return frames_[static_cast<std::size_t>(v)]; }
  std::span<const TangentFrame> frames() const { return frames_; }

  /// Representative in [0, period).
  double reduce(double a) const {
    const double p = period();
    double r = std::fmod(a, p);
    if (r < 0.0) r += p;
    if (r >= p) r -= p;
    return r;
  }

  // Solver diagnostics, filled by compute_field.
  int sweeps = 0;
  double residual = 0.0;

 private:
  int order_ = 4;
  std::vector<double> theta_;
  std::vector<TangentFrame> frames_;
};

struct FieldConstraint {
  Index vertex = 0;
  double theta = 0.0;  // radians in the vertex frame
};

struct FieldSolveOptions {
  double tolerance = 1e-8;
  int max_sweeps = 10000;
  double relaxation = 1.9;  // over-relaxation factor in [1, 2)
};

namespace detail {

struct Rep {
  double c = 1.0;
  double s = 0.0;
};

inline Rep rotate(const Rep& u, double angle) {
  const double ca = std::cos(angle), sa = std::sin(angle);
  return {ca * u.c - sa * u.s, sa * u.c + ca * u.s};
}

}  // namespace detail

/// Rotation mapping angles in the frame of `from` to the frame of `to`,
/// measured through the shared edge direction.
inline double frame_transport(const SurfaceMesh& mesh, const DirectionField& field, Index from, Index to) {
  const Vec3 e = mesh.vertex(from) - mesh.vertex(to);
  return angle_in_frame(field.frame(to), e) - angle_in_frame(field.frame(from), e);
}

/// Smooths a direction field with the given vertex constraints by iterated
/// normalized averaging of transported representation vectors
/// (Gauss-Seidel with over-relaxation), starting from the normalised solution of the linear
/// smoothest-field problem. Without constraints vertex 0 is held. Throws AlgorithmError when the residual
/// stays above the tolerance after max_sweeps.
inline DirectionField solve_field(const SurfaceMesh& mesh, int order, std::span<const FieldConstraint> constraints,
                                  const FieldSolveOptions& options = {}) {
  if (mesh.empty()) throw AlgorithmError("cannot compute a direction field on an empty mesh");
  if (!(options.relaxation >= 1.0 && options.relaxation < 2.0)) throw ConfigError("relaxation must lie in [1, 2)");
  const auto nv = static_cast<std::size_t>(mesh.num_vertices());
  DirectionField field(mesh, order, std::vector<double>(nv, 0.0));
  const double N = order;

  // Per-vertex neighbour transports, aligned with vertex_neighbors.
  std::vector<std::size_t> offsets(nv + 1, 0);
  std::vector<double> transport;
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    for (Index w : mesh.vertex_neighbors(v)) transport.push_back(N * frame_transport(mesh, field, w, v));
    offsets[static_cast<std::size_t>(v) + 1] = transport.size();
  }

  std::vector<detail::Rep> u(nv);
  std::vector<char> fixed(nv, 0);
  for (const FieldConstraint& c : constraints) {
    if (c.vertex < 0 || c.vertex >= mesh.num_vertices()) throw ConfigError("field constraint on invalid vertex");
    const auto k = static_cast<std::size_t>(c.vertex);
    u[k] = {std::cos(N * c.theta), std::sin(N * c.theta)};
    fixed[k] = 1;
  }
  if (std::find(fixed.begin(), fixed.end(), 1) == fixed.end()) fixed[0] = 1;

  // Initial guess: minimiser of sum |u_v - R_vw u_w|^2 over the free
  // vertices, as a real 2n x 2n symmetric system.
  std::vector<Index> slot(nv, -1);
  Index free_count = 0;
  for (std::size_t v = 0; v < nv; ++v)
    if (!fixed[v]) slot[v] = free_count++;
  if (free_count > 0) {
    std::vector<Eigen::Triplet<double>> entries;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * free_count);
    for (std::size_t v = 0; v < nv; ++v) {
      if (fixed[v]) continue;
      const Index r = 2 * slot[v];
      const auto nb = mesh.vertex_neighbors(static_cast<Index>(v));
      entries.emplace_back(r, r, static_cast<double>(nb.size()));
      entries.emplace_back(r + 1, r + 1, static_cast<double>(nb.size()));
      for (std::size_t k = 0; k < nb.size(); ++k) {
        const auto w = static_cast<std::size_t>(nb[k]);
        const double ct = std::cos(transport[offsets[v] + k]), st = std::sin(transport[offsets[v] + k]);
        if (fixed[w]) {
          rhs[r] += ct * u[w].c - st * u[w].s;
          rhs[r + 1] += st * u[w].c + ct * u[w].s;
        } else {
          const Index col = 2 * slot[w];
          entries.emplace_back(r, col, -ct);
          entries.emplace_back(r, col + 1, st);
          entries.emplace_back(r + 1, col, -st);
          entries.emplace_back(r + 1, col + 1, -ct);
        }
      }
    }
    Eigen::SparseMatrix<double> A(2 * free_count, 2 * free_count);
    A.setFromTriplets(entries.begin(), entries.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success) throw AlgorithmError("direction field system is singular");
    const Eigen::VectorXd x = solver.solve(rhs);
    for (std::size_t v = 0; v < nv; ++v) {
      if (fixed[v]) continue;
      const Index r = 2 * slot[v];
      const double len = std::hypot(x[r], x[r + 1]);
      if (len > 1e-300) u[v] = {x[r] / len, x[r + 1] / len};
    }
  }

  double residual = 0.0;
  int sweep = 0;
  for (; sweep < options.max_sweeps; ++sweep) {
    residual = 0.0;
    for (std::size_t v = 0; v < nv; ++v) {
      if (fixed[v]) continue;
      const auto nb = mesh.vertex_neighbors(static_cast<Index>(v));
      double c = 0.0, s = 0.0;
      for (std::size_t k = 0; k < nb.size(); ++k) {
        const auto r = detail::rotate(u[static_cast<std::size_t>(nb[k])], transport[offsets[v] + k]);
        c += r.c;
        s += r.s;
      }
      const double len = std::hypot(c, s);
      if (len < 1e-12) continue;
      const detail::Rep avg{c / len, s / len};
      residual = std::fmax(residual, std::hypot(avg.c - u[v].c, avg.s - u[v].s));
      const double rc = u[v].c + options.relaxation * (avg.c - u[v].c);
      const double rs = u[v].s + options.relaxation * (avg.s - u[v].s);
      const double rl = std::hypot(rc, rs);
      u[v] = rl > 1e-12 ? detail::Rep{rc / rl, rs / rl} : avg;
    }
    if (residual < options.tolerance) {
      ++sweep;
      break;
    }
  }
  if (residual >= options.tolerance)
    throw AlgorithmError("direction field did not converge after " + std::to_string(sweep) +
                         " sweeps (residual " + std::to_string(residual) + ")");

  std::vector<double> theta(nv);
  for (std::size_t v = 0; v < nv; ++v) theta[v] = std::atan2(u[v].s, u[v].c) / N;
  DirectionField out(mesh, order, std::move(theta));
  out.sweeps = sweep;
  out.residual = residual;
  return out;
}

/// Boundary direction constraint at every boundary vertex: the average of the
/// representation vectors of its two incident boundary edges.
inline std::vector<FieldConstraint> boundary_constraints(const SurfaceMesh& mesh, int order) {
  std::vector<FieldConstraint> out;
  std::vector<char> seen(static_cast<std::size_t>(mesh.num_vertices()), 0);
  const auto normals = vertex_normals(mesh);
  const double N = order;
  for (const BoundaryLoop& loop : boundary_loops(mesh)) {
    const auto& vs = loop.vertices;
    const std::size_t n = vs.size();
    for (std::size_t k = 0; k < n; ++k) {
      const Index v = vs[k];
      if (seen[static_cast<std::size_t>(v)]) continue;
      seen[static_cast<std::size_t>(v)] = 1;
      const TangentFrame frame = make_frame(normals[static_cast<std::size_t>(v)]);
      const bool has_prev = loop.closed || k > 0;
      const bool has_next = loop.closed || k + 1 < n;
      double c = 0.0, s = 0.0;
      double fallback = 0.0;
      if (has_prev) {
        const double a = N * angle_in_frame(frame, mesh.vertex(v) - mesh.vertex(vs[(k + n - 1) % n]));
        c += std::cos(a);
        s += std::sin(a);
        fallback = a;
      }
      if (has_next) {
        const double a = N * angle_in_frame(frame, mesh.vertex(vs[(k + 1) % n]) - mesh.vertex(v));
        c += std::cos(a);
        s += std::sin(a);
        fallback = a;
      }
      const double rep = std::hypot(c, s) > 1e-9 ? std::atan2(s, c) : fallback;
      out.push_back({v, rep / N});
    }
  }
  return out;
}

/// Boundary-aligned smooth field. Closed surfaces anchor vertex 0 at theta = 0.
inline DirectionField compute_field(const SurfaceMesh& mesh, int order, const FieldSolveOptions& options = {}) {
  if (!is_valid_order(order)) throw ConfigError("direction field order must be 4 or 6");
  if (mesh.empty()) throw AlgorithmError("cannot compute a direction field on an empty mesh");
  auto constraints = boundary_constraints(mesh, order);
  if (constraints.empty()) constraints.push_back({0, 0.0});
  return solve_field(mesh, order, constraints, options);
}

/// The N field directions at a surface point plus the interpolated normal.
struct Directions {
  int count = 0;
  std::array<Vec3, 6> dirs{};
  Vec3 normal;
  double angle = 0.0;  // angle of dirs[0] in the local frame
  TangentFrame frame;

  std::span<const Vec3> view() const { return {dirs.data(), static_cast<std::size_t>(count)}; }
};

/// Interpolated tangent frame at a surface point: barycentric-weighted vertex
/// normals, t1 along the projection of the triangle's first edge.
inline TangentFrame point_frame(const DirectionField& field, const SurfaceMesh& mesh, const SurfacePoint& p) {
  const Tri& tri = mesh.triangle(p.triangle);
  Vec3 n;
  for (int i = 0; i < 3; ++i)
    n += std::fmax(p.bary[static_cast<std::size_t>(i)], 0.0) * field.frame(tri[static_cast<std::size_t>(i)]).n;
  n = normalized(n);
  if (norm2(n) == 0.0) n = mesh.face_normal(p.triangle);
  const Vec3 e = mesh.corner(p.triangle, 1) - mesh.corner(p.triangle, 0);
  const Vec3 t1 = normalized(e - dot(e, n) * n);
  return {t1, cross(n, t1), n};
}

/// Interpolates the field at `p`: vertex representation vectors are moved
/// into the point frame, averaged with barycentric weights and renormalised.
/// A vanishing average falls back to the vertex with the largest weight.
inline Directions sample_directions(const DirectionField& field, const SurfaceMesh& mesh, const SurfacePoint& p) {
  check_triangle_index(mesh, p.triangle);
  const Tri& tri = mesh.triangle(p.triangle);
  const TangentFrame frame = point_frame(field, mesh, p);
  const double N = field.order();

  std::array<double, 3> rep_angle{};
  double c = 0.0, s = 0.0;
  int strongest = 0;
  for (int i = 0; i < 3; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const TangentFrame& vf = field.frame(tri[k]);
    const double shift = angle_in_frame(frame, vf.t1);
    rep_angle[k] = N * (field.theta(tri[k]) + shift);
    const double w = std::fmax(p.bary[k], 0.0);
    c += w * std::cos(rep_angle[k]);
    s += w * std::sin(rep_angle[k]);
    if (p.bary[k] > p.bary[static_cast<std::size_t>(strongest)]) strongest = i;
  }
  const double rep =
      std::hypot(c, s) > 1e-12 ? std::atan2(s, c) : rep_angle[static_cast<std::size_t>(strongest)];

  Directions out;
  out.count = field.order();
  out.normal = frame.n;
  out.frame = frame;
  out.angle = rep / N;
  for (int k = 0; k < out.count; ++k) {
    const double a = out.angle + 2.0 * kPi * k / N;
    out.dirs[static_cast<std::size_t>(k)] = std::cos(a) * frame.t1 + std::sin(a) * frame.t2;
  }
  return out;
}

/// Per-triangle field index in units of 1/N turn: the winding of the
/// transported representation vectors around the triangle, with the frame
/// holonomy removed. Non-zero entries mark singular triangles; on a closed
/// surface the indices sum to N times the Euler characteristic.
inline std::vector<int> field_singularities(const SurfaceMesh& mesh, const DirectionField& field) {
  const double N = field.order();
  std::vector<int> index(static_cast<std::size_t>(mesh.num_triangles()), 0);
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const Tri& tri = mesh.triangle(t);
    double winding = 0.0, holonomy = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Index a = tri[static_cast<std::size_t>(i)];
      const Index b = tri[static_cast<std::size_t>(next3(i))];
      const double r = frame_transport(mesh, field, a, b);
      holonomy += wrap_angle(r);
      winding += wrap_angle(N * (field.theta(a) + r) - N * field.theta(b));
    }
    index[static_cast<std::size_t>(t)] =
        static_cast<int>(std::lround((N * wrap_angle(holonomy) - winding) / (2.0 * kPi)));
  }
  return index;
}

/// CSV dump: vertex,theta,order.
inline void write_field_csv(std::ostream& out, const DirectionField& field) {
  out << "vertex,theta,order\n";
  const auto th = field.theta();
  for (std::size_t v = 0; v < th.size(); ++v) out << v << ',' << th[v] << ',' << field.order() << '\n';
}

}  // namespace frontmesh
