#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "frontmesh/fixtures.hpp"
#include "frontmesh/mesh_core.hpp"

using namespace frontmesh;

namespace {

SurfaceMesh unit_square() {
  return SurfaceMesh({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 2, 3}});
}

void expect_symmetric_adjacency(const SurfaceMesh& mesh) {
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    for (int e = 0; e < 3; ++e) {
      const Index n = mesh.neighbor(t, e);
      if (n == kNoNeighbor) continue;
      const int back = mesh.edge_towards(n, t);
      ASSERT_GE(back, 0) << "triangle " << n << " does not list " << t;
      // The shared edge has the same endpoints, traversed in reverse.
      const Index a = mesh.triangle(t)[static_cast<std::size_t>(next3(e))];
      const Index b = mesh.triangle(t)[static_cast<std::size_t>(prev3(e))];
      EXPECT_EQ(mesh.triangle(n)[static_cast<std::size_t>(next3(back))], b);
      EXPECT_EQ(mesh.triangle(n)[static_cast<std::size_t>(prev3(back))], a);
    }
  }
}

}  // namespace

TEST(SurfaceMesh, SingleTriangleHasThreeBoundaryEdges) {
  SurfaceMesh mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
  EXPECT_EQ(mesh.num_triangles(), 1);
  EXPECT_EQ(mesh.boundary_edge_count(), 3u);
}

TEST(SurfaceMesh, SquareAdjacentAcrossDiagonal) {
  const SurfaceMesh mesh = unit_square();
  EXPECT_EQ(mesh.edge_towards(0, 1), 1);  // edge opposite vertex 1 is 2-0
  EXPECT_EQ(mesh.edge_towards(1, 0), 2);
  EXPECT_EQ(mesh.boundary_edge_count(), 4u);
  expect_symmetric_adjacency(mesh);
}

TEST(SurfaceMesh, RejectsNonManifoldEdge) {
  EXPECT_THROW(SurfaceMesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}},
                           {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}}),
               MeshError);
}

TEST(SurfaceMesh, RejectsDegenerateTriangle) {
  EXPECT_THROW(SurfaceMesh({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {{0, 1, 2}}), MeshError);
  EXPECT_THROW(SurfaceMesh({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {{0, 1, 1}}), MeshError);
}

TEST(SurfaceMesh, RejectsBadIndexAndFlippedNeighbour) {
  EXPECT_THROW(SurfaceMesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 3}}), MeshError);
  EXPECT_THROW(SurfaceMesh({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 3, 2}}), MeshError);
}

TEST(SurfaceMesh, AdjacencyIsSymmetricOnFixtures) {
  expect_symmetric_adjacency(make_icosphere(2, 1.0));
  expect_symmetric_adjacency(make_grid(7, 5));
  expect_symmetric_adjacency(make_disk(1.0, 0.2));
  expect_symmetric_adjacency(make_annulus(0.4, 1.0, 0.15));
}

TEST(PositionOf, IdentityCentroidAndMidpoint) {
  SurfaceMesh mesh({{1, 2, 3}, {4, 2, 0}, {0, 5, 1}}, {{0, 1, 2}});
  EXPECT_EQ(position_of(mesh, {0, {1, 0, 0}}), (Vec3{1, 2, 3}));
  const Vec3 c = position_of(mesh, {0, {1.0 / 3, 1.0 / 3, 1.0 / 3}});
  EXPECT_NEAR(c.x, 5.0 / 3, 1e-15);
  EXPECT_NEAR(c.y, 3.0, 1e-15);
  EXPECT_NEAR(c.z, 4.0 / 3, 1e-15);
  EXPECT_EQ(position_of(mesh, {0, {0.5, 0.5, 0}}), (Vec3{2.5, 2, 1.5}));
  EXPECT_THROW(position_of(mesh, {3, {1, 0, 0}}), MeshError);
}

TEST(Barycentric, VertexAndCentroid) {
  SurfaceMesh mesh({{1, 2, 3}, {4, 2, 0}, {0, 5, 1}}, {{0, 1, 2}});
  const Bary b = barycentric(mesh, 0, mesh.vertex(1));
  EXPECT_NEAR(b[0], 0.0, 1e-15);
  EXPECT_NEAR(b[1], 1.0, 1e-15);
  EXPECT_NEAR(b[2], 0.0, 1e-15);
  const Bary c = barycentric(mesh, 0, mesh.centroid(0));
  for (double l : c) EXPECT_NEAR(l, 1.0 / 3.0, 1e-15);
}

TEST(Barycentric, ProjectsOffPlanePoints) {
  const SurfaceMesh mesh = unit_square();
  const Bary b = barycentric(mesh, 0, {0.75, 0.25, 3.0});
  EXPECT_NEAR(b[0] + b[1] + b[2], 1.0, 1e-15);
  const Vec3 p = position_of(mesh, {0, b});
  EXPECT_NEAR(p.x, 0.75, 1e-15);
  EXPECT_NEAR(p.y, 0.25, 1e-15);
  EXPECT_NEAR(p.z, 0.0, 1e-15);
}

TEST(Barycentric, RoundTripProperty) {
  const SurfaceMesh mesh = make_icosphere(2, 3.0);
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<Index> tri(0, mesh.num_triangles() - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    double a = u(rng), b = u(rng);
    if (a + b > 1.0) {
      a = 1.0 - a;
      b = 1.0 - b;
    }
    const SurfacePoint p{tri(rng), {a, b, 1.0 - a - b}};
    ASSERT_TRUE(is_valid(mesh, p));
    const Vec3 x = position_of(mesh, p);
    const Bary back = barycentric(mesh, p.triangle, x);
    EXPECT_NEAR(back[0] + back[1] + back[2], 1.0, 1e-12);
    const Vec3 y = position_of(mesh, {p.triangle, back});
    EXPECT_LE(distance(x, y), 1e-9);
  }
}

TEST(BoundaryLoops, SquareHasOneLoopOfFour) {
  const auto loops = boundary_loops(unit_square());
  ASSERT_EQ(loops.size(), 1u);
  EXPECT_EQ(loops[0].vertices.size(), 4u);
  EXPECT_TRUE(loops[0].closed);
}

TEST(BoundaryLoops, ClosedSurfaceHasNone) { EXPECT_TRUE(boundary_loops(make_icosphere(1, 1.0)).empty()); }

TEST(BoundaryLoops, AnnulusHasTwoOrientedLoopsCoveringEveryBoundaryEdge) {
  const SurfaceMesh mesh = make_annulus(0.5, 1.0, 0.1);
  const auto loops = boundary_loops(mesh);
  ASSERT_EQ(loops.size(), 2u);

  std::multiset<std::pair<Index, Index>> loop_edges;
  for (const auto& loop : loops) {
    ASSERT_TRUE(loop.closed);
    const auto& v = loop.vertices;
    // Interior on the left: the outer loop turns counter-clockwise (positive
    // signed area) and the hole loop clockwise.
    double area2 = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Vec3& a = mesh.vertex(v[k]);
      const Vec3& b = mesh.vertex(v[(k + 1) % v.size()]);
      area2 += a.x * b.y - b.x * a.y;
      loop_edges.emplace(v[k], v[(k + 1) % v.size()]);
    }
    const double r = norm(mesh.vertex(v[0]));
    if (r > 0.75)
      EXPECT_GT(area2, 0.0);
    else
      EXPECT_LT(area2, 0.0);
  }
  std::multiset<std::pair<Index, Index>> mesh_edges;
  for (Index t = 0; t < mesh.num_triangles(); ++t)
    for (int e = 0; e < 3; ++e)
      if (mesh.neighbor(t, e) == kNoNeighbor)
        mesh_edges.emplace(mesh.triangle(t)[static_cast<std::size_t>(next3(e))],
                           mesh.triangle(t)[static_cast<std::size_t>(prev3(e))]);
  EXPECT_EQ(loop_edges, mesh_edges);
}

TEST(Icosphere, CountsAndRadius) {
  EXPECT_EQ(make_icosphere(0, 1.0).num_triangles(), 20);
  EXPECT_EQ(make_icosphere(0, 1.0).num_vertices(), 12);
  EXPECT_EQ(make_icosphere(1, 1.0).num_triangles(), 80);
  EXPECT_EQ(make_icosphere(1, 1.0).num_vertices(), 42);
  const SurfaceMesh s = make_icosphere(3, 2.5);
  EXPECT_EQ(s.num_triangles(), 1280);
  EXPECT_FALSE(s.has_boundary());
  for (const Vec3& v : s.vertices()) EXPECT_NEAR(norm(v), 2.5, 1e-12 * 2.5);
  // Outward winding.
  for (Index t = 0; t < s.num_triangles(); ++t) EXPECT_GT(dot(s.area_vector(t), s.centroid(t)), 0.0);
}

TEST(Fixtures, DiskAndGridAreCounterClockwise) {
  for (const SurfaceMesh& m : {make_disk(1.0, 0.1), make_grid(4, 3, 2.0, 1.0, 0, 0, 0.3), make_annulus(0.3, 1, 0.1)})
    for (Index t = 0; t < m.num_triangles(); ++t) EXPECT_GT(m.area_vector(t).z, 0.0);
}
