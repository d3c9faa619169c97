// Writes the synthetic base meshes used by the tests and the README examples.

#include <iostream>

#include "CLI11.hpp"
#include "frontmesh/fixtures.hpp"
#include "frontmesh/mesh_io.hpp"

int main(int argc, char** argv) {
  using namespace frontmesh;
  CLI::App app{"Generate synthetic base meshes"};
  app.require_subcommand(1);
  std::string out;
  int nx = 10, ny = 10, sub = 3;
  double w = 1.0, h = 1.0, jitter = 0.0, radius = 1.0, inner = 0.5, size = 0.1;

  auto* grid = app.add_subcommand("grid", "Rectangle split into right triangles");
  grid->add_option("--nx", nx)->capture_default_str();
  grid->add_option("--ny", ny)->capture_default_str();
  grid->add_option("--width", w)->capture_default_str();
  grid->add_option("--height", h)->capture_default_str();
  grid->add_option("--jitter", jitter, "Interior displacement in cell sizes")->capture_default_str();
  auto* disk = app.add_subcommand("disk", "Disk triangulated in rings");
  disk->add_option("--radius", radius)->capture_default_str();
  disk->add_option("--spacing", size, "Ring spacing")->capture_default_str();
  auto* annulus = app.add_subcommand("annulus", "Annulus triangulated in rings");
  annulus->add_option("--inner", inner)->capture_default_str();
  annulus->add_option("--radius", radius)->capture_default_str();
  annulus->add_option("--spacing", size)->capture_default_str();
  auto* sphere = app.add_subcommand("icosphere", "Subdivided icosahedron");
  sphere->add_option("--subdivisions", sub)->capture_default_str();
  sphere->add_option("--radius", radius)->capture_default_str();
  for (auto* c : {grid, disk, annulus, sphere}) c->add_option("-o,--output", out, "OBJ or OFF path")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    SurfaceMesh m;
    if (*grid) m = make_grid(nx, ny, w, h, 0.0, 0.0, jitter);
    else if (*disk) m = make_disk(radius, size);
    else if (*annulus) m = make_annulus(inner, radius, size);
    else m = make_icosphere(sub, radius);
    save_mesh(out, m);
  } catch (const ConfigError& e) {
    std::cerr << "fixturegen: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "fixturegen: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
