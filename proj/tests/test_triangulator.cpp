#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "frontmesh/fixtures.hpp"
#include "frontmesh/triangulator.hpp"

using namespace frontmesh;

namespace {

// Points strictly inside a triangle's circumcircle, computed independently
// in long double with a relative tolerance.
int circumcircle_violations(std::span<const Vec2> pts, std::span<const Tri> tris) {
  int bad = 0;
  for (const Tri& t : tris) {
    const long double ax = pts[static_cast<std::size_t>(t[0])].x, ay = pts[static_cast<std::size_t>(t[0])].y;
    const long double bx = pts[static_cast<std::size_t>(t[1])].x, by = pts[static_cast<std::size_t>(t[1])].y;
    const long double cx = pts[static_cast<std::size_t>(t[2])].x, cy = pts[static_cast<std::size_t>(t[2])].y;
    const long double d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    const long double ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d;
    const long double uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d;
    const long double r = std::sqrt((ax - ux) * (ax - ux) + (ay - uy) * (ay - uy));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (static_cast<Index>(i) == t[0] || static_cast<Index>(i) == t[1] || static_cast<Index>(i) == t[2]) continue;
      const long double dx = pts[i].x - ux, dy = pts[i].y - uy;
      if (std::sqrt(dx * dx + dy * dy) < r * (1 - 1e-9L)) ++bad;
    }
  }
  return bad;
}

double signed_area(std::span<const Vec2> p, const Tri& t) {
  const Vec2 a = p[static_cast<std::size_t>(t[0])], b = p[static_cast<std::size_t>(t[1])], c = p[static_cast<std::size_t>(t[2])];
  return 0.5 * cross(b - a, c - a);
}

std::vector<Vec2> random_points(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec2> p;
  for (int i = 0; i < n; ++i) p.push_back({u(rng), u(rng)});
  return p;
}

std::vector<GeneratedPoint> generate(const SurfaceMesh& mesh, int order, double h) {
  const DirectionField f = compute_field(mesh, order);
  return generate_points(mesh, f, SizeField::constant(h)).points;
}

}  // namespace

TEST(Delaunay2d, SquareCorners) {
  const std::vector<Vec2> p = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto tris = delaunay_2d(p);
  ASSERT_EQ(tris.size(), 2u);
  for (const Tri& t : tris) EXPECT_NEAR(signed_area(p, t), 0.5, 1e-15);
  EXPECT_EQ(circumcircle_violations(p, tris), 0);
}

TEST(Delaunay2d, CollinearPlusOne) {
  const std::vector<Vec2> p = {{0, 0}, {1, 0}, {2, 0}, {1, 1}};
  const auto tris = delaunay_2d(p);
  ASSERT_EQ(tris.size(), 2u);
  for (const Tri& t : tris) EXPECT_GT(signed_area(p, t), 0.0);
  const std::vector<Vec2> line = {{0, 0}, {1, 1}, {2, 2}};
  EXPECT_TRUE(delaunay_2d(line).empty());
}

TEST(Delaunay2d, RandomPointsMatchBruteForce) {
  for (int n : {100, 500}) {
    const auto p = random_points(n, static_cast<unsigned>(n));
    const auto tris = delaunay_2d(p);
    EXPECT_EQ(circumcircle_violations(p, tris), 0);
    double area = 0.0;
    for (const Tri& t : tris) {
      EXPECT_GT(signed_area(p, t), 0.0);
      area += signed_area(p, t);
    }
    // Euler: 2n - 2 - (hull vertices) triangles; area equals the hull area.
    std::set<std::pair<Index, Index>> directed;
    for (const Tri& t : tris)
      for (int e = 0; e < 3; ++e) directed.insert({t[static_cast<std::size_t>(e)], t[static_cast<std::size_t>(next3(e))]});
    int hull = 0;
    double shoelace = 0.0;
    for (const auto& [a, b] : directed)
      if (!directed.count({b, a})) {
        ++hull;
        shoelace += 0.5 * cross(p[static_cast<std::size_t>(a)], p[static_cast<std::size_t>(b)]);
      }
    EXPECT_EQ(static_cast<int>(tris.size()), 2 * n - 2 - hull);
    EXPECT_NEAR(area, shoelace, 1e-12);
  }
}

TEST(Delaunay2d, CocircularGridHasNoDegenerateTriangles) {
  std::vector<Vec2> p;
  for (int j = 0; j <= 6; ++j)
    for (int i = 0; i <= 6; ++i) p.push_back({i * 0.1, j * 0.1});
  const auto tris = delaunay_2d(p);
  EXPECT_EQ(tris.size(), 72u);
  for (const Tri& t : tris) EXPECT_NEAR(signed_area(p, t), 0.005, 1e-12);
  EXPECT_EQ(circumcircle_violations(p, tris), 0);
}

TEST(Delaunay2d, ConstrainedSquareWithHole) {
  std::vector<Vec2> p = {{0, 0}, {3, 0}, {3, 3}, {0, 3}, {1, 1}, {1, 2}, {2, 2}, {2, 1}};
  const auto extra = random_points(60, 3);
  for (const Vec2& q : extra) {
    const Vec2 s{3 * q.x, 3 * q.y};
    if (s.x > 0.95 && s.x < 2.05 && s.y > 0.95 && s.y < 2.05) continue;
    p.push_back(s);
  }
  // Outer loop counter-clockwise, hole clockwise.
  const std::vector<std::pair<Index, Index>> seg = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6}, {6, 7}, {7, 4}};
  const auto tris = constrained_delaunay_2d(p, seg);
  double area = 0.0;
  for (const Tri& t : tris) {
    EXPECT_GT(signed_area(p, t), 0.0);
    area += signed_area(p, t);
    const Vec2 c{(p[static_cast<std::size_t>(t[0])].x + p[static_cast<std::size_t>(t[1])].x + p[static_cast<std::size_t>(t[2])].x) / 3,
                 (p[static_cast<std::size_t>(t[0])].y + p[static_cast<std::size_t>(t[1])].y + p[static_cast<std::size_t>(t[2])].y) / 3};
    EXPECT_FALSE(c.x > 1 && c.x < 2 && c.y > 1 && c.y < 2);
  }
  EXPECT_NEAR(area, 8.0, 1e-12);
}

TEST(Delaunay2d, ConstraintThroughCollinearPointIsSplit) {
  const std::vector<Vec2> p = {{0, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 1}, {0.2, 1.5}, {1.8, 0.4}};
  const std::vector<std::pair<Index, Index>> seg = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}};
  const auto tris = constrained_delaunay_2d(p, seg);
  std::set<std::pair<Index, Index>> edges;
  for (const Tri& t : tris)
    for (int e = 0; e < 3; ++e) {
      const Index a = t[static_cast<std::size_t>(e)], b = t[static_cast<std::size_t>(next3(e))];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  EXPECT_TRUE(edges.count({0, 4}));
  EXPECT_TRUE(edges.count({2, 4}));
  double area = 0.0;
  for (const Tri& t : tris) area += signed_area(p, t);
  EXPECT_NEAR(area, 4.0, 1e-12);
}

TEST(Triangulate, PlanarSquareUsesEveryPointAndPreservesArea) {
  const SurfaceMesh mesh = make_grid(10, 10);
  const auto pts = generate(mesh, 4, 0.1);
  TriangulationStats st;
  const OutputMesh out = triangulate(mesh, pts, &st);
  EXPECT_TRUE(st.planar);
  EXPECT_EQ(out.vertices.size(), pts.size());
  EXPECT_NEAR(triangles_area(out.vertices, out.triangles), 1.0, 1e-12);
  const SurfaceMesh check(out.vertices, out.triangles);  // throws if not manifold / oriented
  // Triangulated disk: F = 2V - B - 2.
  const auto loops = boundary_loops(check);
  ASSERT_EQ(loops.size(), 1u);
  EXPECT_EQ(check.num_triangles(), 2 * check.num_vertices() - static_cast<Index>(loops[0].vertices.size()) - 2);
  for (Index t = 0; t < check.num_triangles(); ++t) EXPECT_GT(check.face_normal(t).z, 0.0);
}

TEST(Triangulate, PlanarBoundaryPointsBetweenBaseVertices) {
  // Sizes finer than the base boundary edges put generated points on them.
  const SurfaceMesh mesh = make_grid(10, 10);
  for (int order : {4, 6})
    for (double h : {0.05, 0.033, 0.021}) {
      const auto pts = generate(mesh, order, h);
      const OutputMesh out = triangulate(mesh, pts);
      EXPECT_EQ(out.vertices.size(), pts.size());
      EXPECT_NEAR(triangles_area(out.vertices, out.triangles), 1.0, 1e-9);
      const SurfaceMesh check(out.vertices, out.triangles);
      EXPECT_EQ(boundary_loops(check).size(), 1u);
    }
}

TEST(Triangulate, PlanarAnnulusKeepsTheHole) {
  const SurfaceMesh mesh = make_annulus(0.4, 1.0, 0.08);
  const auto pts = generate(mesh, 6, 0.08);
  const OutputMesh out = triangulate(mesh, pts);
  double base = 0.0;
  for (Index t = 0; t < mesh.num_triangles(); ++t) base += mesh.area(t);
  EXPECT_NEAR(triangles_area(out.vertices, out.triangles), base, 1e-9);
  const SurfaceMesh check(out.vertices, out.triangles);
  EXPECT_EQ(boundary_loops(check).size(), 2u);
  std::vector<Vec2> xy;
  for (const Vec3& v : out.vertices) xy.push_back({v.x, v.y});
  // Delaunay away from the boundary: no point strictly inside the
  // circumcircle of a triangle with no boundary edge.
  std::vector<Tri> interior;
  for (Index t = 0; t < check.num_triangles(); ++t)
    if (check.neighbor(t, 0) >= 0 && check.neighbor(t, 1) >= 0 && check.neighbor(t, 2) >= 0) interior.push_back(check.triangle(t));
  int bad = 0;
  for (const Tri& t : interior) {
    for (std::size_t i = 0; i < xy.size(); ++i) {
      // visibility: only count points on the same side of the hole as the
      // triangle (the annulus is not convex, so use the local neighbourhood).
      if (distance(out.vertices[i], out.vertices[static_cast<std::size_t>(t[0])]) > 0.3) continue;
      std::vector<Vec2> four = {xy[static_cast<std::size_t>(t[0])], xy[static_cast<std::size_t>(t[1])], xy[static_cast<std::size_t>(t[2])], xy[i]};
      const std::array<Tri, 1> local{Tri{0, 1, 2}};
      bad += circumcircle_violations(four, local);
    }
  }
  EXPECT_EQ(bad, 0);
}

TEST(Triangulate, SphereIsAClosedManifold) {
  const SurfaceMesh mesh = make_icosphere(3, 1.0);
  const auto pts = generate(mesh, 6, 0.15);
  TriangulationStats st;
  const OutputMesh out = triangulate(mesh, pts, &st);
  EXPECT_FALSE(st.planar);
  EXPECT_TRUE(st.flips_converged);
  EXPECT_GT(st.removed_base_vertices, 0u);
  EXPECT_LT(std::fabs(st.area_after_flips - st.area_before_flips), 0.01 * st.area_before_flips);
  const SurfaceMesh check(out.vertices, out.triangles);
  EXPECT_EQ(check.num_vertices(), static_cast<Index>(pts.size()));
  EXPECT_FALSE(check.has_boundary());
  EXPECT_EQ(check.num_vertices() - static_cast<Index>(check.num_triangles()) / 2, 2);  // V - E + F with E = 3F/2
  for (Index t = 0; t < check.num_triangles(); ++t) EXPECT_GT(dot(check.face_normal(t), check.centroid(t)), 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(out.vertices[i], pts[i].position);
}

TEST(Triangulate, CurvedOpenPatch) {
  SurfaceMesh flat = make_grid(12, 12);
  std::vector<Vec3> bent;
  for (const Vec3& v : flat.vertices()) bent.push_back({std::sin(v.x), v.y, 1.0 - std::cos(v.x)});
  const SurfaceMesh mesh(bent, flat.triangles());
  const auto pts = generate(mesh, 4, 0.09);
  TriangulationStats st;
  const OutputMesh out = triangulate(mesh, pts, &st);
  EXPECT_FALSE(st.planar);
  const SurfaceMesh check(out.vertices, out.triangles);
  EXPECT_EQ(check.num_vertices(), static_cast<Index>(pts.size()));
  EXPECT_EQ(boundary_loops(check).size(), 1u);
  double base = 0.0;
  for (Index t = 0; t < mesh.num_triangles(); ++t) base += mesh.area(t);
  EXPECT_NEAR(triangles_area(out.vertices, out.triangles), base, 0.01 * base);
}

TEST(Triangulate, DuplicatePointIsAnError) {
  const SurfaceMesh mesh = make_grid(4, 4);
  auto pts = generate(mesh, 4, 0.25);
  pts.push_back(pts.back());
  EXPECT_THROW(triangulate(mesh, pts), AlgorithmError);
}
