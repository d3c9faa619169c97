#include <gtest/gtest.h>

#include <sstream>

#include "frontmesh/fixtures.hpp"
#include "frontmesh/mesh_io.hpp"

using namespace frontmesh;

TEST(ReadOff, MinimalTriangle) {
  std::istringstream in("OFF\n# comment\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  const SurfaceMesh mesh = read_off(in);
  EXPECT_EQ(mesh.num_triangles(), 1);
  EXPECT_EQ(mesh.boundary_edge_count(), 3u);
}

TEST(ReadObj, SquareWithSlashesAndQuadFace) {
  std::istringstream in(
      "# square\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\n");
  const SurfaceMesh mesh = read_obj(in);
  EXPECT_EQ(mesh.num_triangles(), 2);
  EXPECT_EQ(mesh.edge_towards(0, 1), 1);
}

TEST(ReadObj, NegativeIndices) {
  std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n");
  EXPECT_EQ(read_obj(in).num_triangles(), 1);
}

TEST(ReadObj, ErrorsOnMalformedInput) {
  std::istringstream bad_vertex("v 0 0\nf 1 2 3\n");
  EXPECT_THROW(read_obj(bad_vertex), IoError);
  std::istringstream bad_index("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 x 3\n");
  EXPECT_THROW(read_obj(bad_index), IoError);
  std::istringstream short_face("v 0 0 0\nv 1 0 0\nf 1 2\n");
  EXPECT_THROW(read_obj(short_face), IoError);
}

TEST(ReadOff, ErrorsOnMalformedInput) {
  std::istringstream no_header("3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  EXPECT_THROW(read_off(no_header), IoError);
  std::istringstream truncated("OFF\n3 1 0\n0 0 0\n1 0 0\n");
  EXPECT_THROW(read_off(truncated), IoError);
}

TEST(ReadOff, NonManifoldFileIsRejected) {
  std::istringstream in("OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n0 0 1\n3 0 1 2\n3 1 0 3\n3 0 1 4\n");
  EXPECT_THROW(read_off(in), MeshError);
}

TEST(WriteObj, ReadBackPreservesGeometry) {
  const SurfaceMesh mesh = make_disk(1.0, 0.25);
  std::stringstream buf;
  write_obj(buf, PolyView{mesh.vertices(), mesh.triangles(), {}, {}});
  const SurfaceMesh back = read_obj(buf);
  ASSERT_EQ(back.num_vertices(), mesh.num_vertices());
  ASSERT_EQ(back.triangles(), mesh.triangles());
  for (Index v = 0; v < mesh.num_vertices(); ++v) EXPECT_EQ(back.vertex(v), mesh.vertex(v));
}

TEST(WriteVtk, EmitsTriangleAndQuadCells) {
  const std::vector<Vec3> verts = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {2, 0, 0}};
  const std::vector<Tri> tris = {{1, 4, 2}};
  const std::vector<std::array<Index, 4>> quads = {{0, 1, 2, 3}};
  const std::vector<double> quality = {0.5, 1.0};
  std::ostringstream out;
  write_vtk(out, PolyView{verts, tris, quads, quality});
  const std::string s = out.str();
  EXPECT_NE(s.find("DATASET POLYDATA"), std::string::npos);
  EXPECT_NE(s.find("POINTS 5 double"), std::string::npos);
  EXPECT_NE(s.find("POLYGONS 2 9"), std::string::npos);
  EXPECT_NE(s.find("\n3 1 4 2\n"), std::string::npos);
  EXPECT_NE(s.find("\n4 0 1 2 3\n"), std::string::npos);
  EXPECT_NE(s.find("CELL_DATA 2"), std::string::npos);
}

TEST(FormatFromPath, RecognisesExtensions) {
  EXPECT_EQ(format_from_path("a/b.OBJ"), MeshFormat::Obj);
  EXPECT_EQ(format_from_path("x.off"), MeshFormat::Off);
  EXPECT_THROW(format_from_path("x.stl"), IoError);
}
