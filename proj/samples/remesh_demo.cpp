// Remeshes two synthetic surfaces and writes VTK files next to the binary
// (or into the directory given as the first argument):
//   annulus_quads.vtk     cross field, optimization, quad recombination
//   sphere_triangles.vtk  asterisk field, near-equilateral triangles

#include <cstdio>
#include <filesystem>

#include "frontmesh/frontmesh.hpp"

namespace fm = frontmesh;

namespace {

void annulus(const std::filesystem::path& dir) {
  const fm::SurfaceMesh base = fm::make_annulus(0.4, 1.0, 0.05);
  const fm::DirectionField field = fm::compute_field(base, 4);
  const auto pts = fm::generate_points(base, field, fm::SizeField::constant(0.04));
  fm::OutputMesh out = fm::triangulate(base, pts.points);
  const auto opt = fm::optimize_cavities(out, field, base);
  const fm::RecombineResult rec = fm::recombine(out);

  std::vector<std::array<fm::Index, 4>> quads;
  std::vector<double> quality;
  for (const fm::QuadElement& q : rec.quads) {
    quads.push_back({q.v[0], q.v[1], q.v[2], q.v[3]});
    quality.push_back(q.quality);
  }
  std::vector<fm::Tri> rest;
  std::vector<double> cells;
  for (fm::Index t : rec.leftover) {
    rest.push_back(out.triangles[static_cast<std::size_t>(t)]);
    cells.push_back(fm::right_angled_quality(out, t, field, base).qt);
  }
  cells.insert(cells.end(), quality.begin(), quality.end());
  fm::save_mesh(dir / "annulus_quads.vtk", fm::PolyView{out.vertices, rest, quads, cells});
  std::printf("annulus: %zu points, %zu relocations, %zu quads (mean quality %.3f), %zu triangles left\n",
              pts.points.size(), opt.relocations.size(), rec.quads.size(), rec.mean_quality, rest.size());
}

void sphere(const std::filesystem::path& dir) {
  const fm::SurfaceMesh base = fm::make_icosphere(3, 1.0);
  const fm::DirectionField field = fm::compute_field(base, 6);
  const auto pts = fm::generate_points(base, field, fm::SizeField::constant(0.08));
  const fm::OutputMesh out = fm::triangulate(base, pts.points);
  std::vector<double> gamma;
  double mean = 0.0;
  for (const fm::Tri& t : out.triangles) {
    gamma.push_back(fm::radius_ratio(out.vertices[static_cast<std::size_t>(t[0])],
                                     out.vertices[static_cast<std::size_t>(t[1])],
                                     out.vertices[static_cast<std::size_t>(t[2])]));
    mean += gamma.back() / static_cast<double>(out.triangles.size());
  }
  fm::save_mesh(dir / "sphere_triangles.vtk", fm::PolyView{out.vertices, out.triangles, {}, gamma});
  std::printf("sphere: %zu points, %zu triangles, mean radius ratio %.3f\n", pts.points.size(), out.triangles.size(),
              mean);
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : ".";
  try {
    annulus(dir);
    sphere(dir);
  } catch (const fm::Error& e) {
    std::fprintf(stderr, "remesh_demo: %s\n", e.what());
    return 1;
  }
  return 0;
}
