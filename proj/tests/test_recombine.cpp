#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "frontmesh/recombine.hpp"
#include "test_support.hpp"

using namespace frontmesh;

TEST(QuadQuality, Values) {
  EXPECT_DOUBLE_EQ(quad_quality({Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{1, 1, 0}, Vec3{0, 1, 0}}), 1.0);
  const double c = 0.5, s = std::sqrt(3.0) / 2;
  EXPECT_NEAR(quad_quality({Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{1 + c, s, 0}, Vec3{c, s, 0}}), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(quad_quality({Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{2, 0, 0}, Vec3{1, 1, 0}}), 0.0, 1e-12);
  // Rectangle, and a tilted rectangle in 3D.
  EXPECT_NEAR(quad_quality({Vec3{0, 0, 0}, Vec3{3, 0, 0}, Vec3{3, 1, 0}, Vec3{0, 1, 0}}), 1.0, 1e-12);
  EXPECT_NEAR(quad_quality({Vec3{0, 0, 0}, Vec3{1, 0, 1}, Vec3{1, 1, 1}, Vec3{0, 1, 0}}), 1.0, 1e-12);
}

TEST(QuadQuality, BowTieIsRejected) {
  EXPECT_THROW(quad_quality({Vec3{0, 0, 0}, Vec3{1, 1, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}}), AlgorithmError);
}

TEST(QuadQuality, NonConvexDart) {
  const std::array<Vec3, 4> dart{Vec3{0, 0, 0}, Vec3{2, 1, 0}, Vec3{0, 2, 0}, Vec3{0.5, 1, 0}};
  EXPECT_TRUE(is_simple_quad(dart));
  EXPECT_FALSE(is_convex_quad(dart));
  EXPECT_NEAR(quad_quality(dart), 0.0, 1e-12);  // reflex corner
}

TEST(Recombine, TwoRightTrianglesMakeASquare) {
  OutputMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  const auto r = recombine(m);
  ASSERT_EQ(r.quads.size(), 1u);
  EXPECT_DOUBLE_EQ(r.quads[0].quality, 1.0);
  EXPECT_TRUE(r.leftover.empty());
  EXPECT_EQ(m.quad_pairs.size(), 1u);
  // Winding follows the triangles.
  std::array<Vec3, 4> x;
  for (std::size_t k = 0; k < 4; ++k) x[k] = m.vertices[static_cast<std::size_t>(r.quads[0].v[k])];
  EXPECT_GT(detail::quad_normal(x).z, 0.0);
}

TEST(Recombine, SingleTriangleIsLeftOver) {
  OutputMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  m.triangles = {{0, 1, 2}};
  const auto r = recombine(m);
  EXPECT_TRUE(r.quads.empty());
  EXPECT_EQ(r.leftover.size(), 1u);
}

TEST(Recombine, StripOfRightTriangles) {
  for (int n : {1, 5, 12}) {
    OutputMesh m = frontmesh::testing::output_from_base(make_grid(n, 1, n, 1));
    const auto r = recombine(m);
    EXPECT_EQ(static_cast<int>(r.quads.size()), n);
    EXPECT_TRUE(r.leftover.empty());
    for (const QuadElement& q : r.quads) EXPECT_GE(q.quality, 0.95);
  }
}

TEST(Recombine, ValidMatchingAndThresholdMonotone) {
  OutputMesh m = frontmesh::testing::output_from_base(make_grid(10, 10, 1, 1, 0, 0, 0.3, 4));
  std::size_t previous = m.triangles.size();
  for (double thr : {0.0, 0.3, 0.5, 0.7, 0.9, 0.99}) {
    const auto r = recombine(m, thr);
    std::set<Index> seen;
    for (const QuadElement& q : r.quads) {
      EXPECT_TRUE(seen.insert(q.source[0]).second);
      EXPECT_TRUE(seen.insert(q.source[1]).second);
      EXPECT_GE(q.quality, thr);
      EXPECT_NEAR(quad_quality(q, m.vertices), q.quality, 1e-15);
    }
    EXPECT_EQ(seen.size() + r.leftover.size(), m.triangles.size());
    EXPECT_LE(r.quads.size(), previous);
    previous = r.quads.size();
  }
}

TEST(Recombine, CountsNonConvexQuads) {
  OutputMesh m;
  m.vertices = {{0, 0, 0}, {2, 1, 0}, {0, 2, 0}, {0.5, 1, 0}};
  m.triangles = {{0, 1, 3}, {1, 2, 3}};
  auto r = recombine(m, 0.0);
  ASSERT_EQ(r.quads.size(), 1u);
  EXPECT_EQ(r.nonconvex, 1u);
  r = recombine(m, 0.3);
  EXPECT_TRUE(r.quads.empty());
  EXPECT_THROW(recombine(m, 1.5), ConfigError);
}
