#pragma once

// Synthetic planar domains (square grid, disk, annulus) in the z = 0 plane
// with counter-clockwise triangles.

#include <cmath>
#include <random>
#include <vector>

#include "frontmesh/mesh_core.hpp"

namespace frontmesh {

/// Rectangle [x0, x0 + width] x [y0, y0 + height] split into nx by ny cells,
/// each cut along its (i, j)-(i+1, j+1) diagonal. Interior vertices are
/// displaced by up to `jitter` cell sizes when non-zero.
inline SurfaceMesh make_grid(int nx, int ny, double width = 1.0, double height = 1.0, double x0 = 0.0,
                             double y0 = 0.0, double jitter = 0.0, unsigned seed = 1) {
  if (nx < 1 || ny < 1) throw ConfigError("grid needs at least one cell per direction");
  const double dx = width / nx;
  const double dy = height / ny;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> offset(-jitter, jitter);
  std::vector<Vec3> verts;
  verts.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      Vec3 p{x0 + i * dx, y0 + j * dy, 0.0};
      if (jitter > 0.0 && i > 0 && j > 0 && i < nx && j < ny) {
        p.x += offset(rng) * dx;
        p.y += offset(rng) * dy;
      }
      verts.push_back(p);
    }
  }
  auto id = [nx](int i, int j) { return static_cast<Index>(j * (nx + 1) + i); };
  std::vector<Tri> tris;
  tris.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return SurfaceMesh(std::move(verts), std::move(tris));
}

namespace detail {

// Stitches concentric rings; ring 0 may be a single centre vertex.
inline SurfaceMesh make_rings(const std::vector<double>& radii, double h) {
  std::vector<Vec3> verts;
  std::vector<std::vector<Index>> rings;
  std::vector<std::vector<double>> angles;
  for (double r : radii) {
    std::vector<Index> ids;
    std::vector<double> ang;
    if (r == 0.0) {
      ids.push_back(static_cast<Index>(verts.size()));
      verts.push_back({0.0, 0.0, 0.0});
      ang.push_back(0.0);
    } else {
      const int n = std::max(6, static_cast<int>(std::lround(2.0 * kPi * r / h)));
      for (int k = 0; k < n; ++k) {
        const double a = 2.0 * kPi * k / n;
        ids.push_back(static_cast<Index>(verts.size()));
        verts.push_back({r * std::cos(a), r * std::sin(a), 0.0});
        ang.push_back(a);
      }
    }
    rings.push_back(std::move(ids));
    angles.push_back(std::move(ang));
  }

  std::vector<Tri> tris;
  for (std::size_t k = 1; k < rings.size(); ++k) {
    const auto& in = rings[k - 1];
    const auto& out = rings[k];
    const auto& ain = angles[k - 1];
    const auto& aout = angles[k];
    const std::size_t ni = in.size();
    const std::size_t no = out.size();
    if (ni == 1) {
      for (std::size_t j = 0; j < no; ++j) tris.push_back({in[0], out[j], out[(j + 1) % no]});
      continue;
    }
    auto angle_at = [](const std::vector<double>& a, std::size_t i) {
      return i < a.size() ? a[i] : a[i - a.size()] + 2.0 * kPi;
    };
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ni || j < no) {
      const bool advance_outer = i == ni || (j < no && angle_at(aout, j + 1) <= angle_at(ain, i + 1));
      if (advance_outer) {
        tris.push_back({in[i % ni], out[j % no], out[(j + 1) % no]});
        ++j;
      } else {
        tris.push_back({in[i % ni], out[j % no], in[(i + 1) % ni]});
        ++i;
      }
    }
  }
  return SurfaceMesh(std::move(verts), std::move(tris));
}

}  // namespace detail

/// Disk of the given radius centred at the origin, built from concentric
/// rings with edge length close to `h`.
inline SurfaceMesh make_disk(double radius, double h) {
  const int rings = std::max(1, static_cast<int>(std::lround(radius / h)));
  std::vector<double> radii;
  for (int k = 0; k <= rings; ++k) radii.push_back(radius * k / rings);
  return detail::make_rings(radii, h);
}

/// Annulus between `inner` and `outer` radii with edge length close to `h`.
inline SurfaceMesh make_annulus(double inner, double outer, double h) {
  if (!(inner > 0.0 && outer > inner)) throw ConfigError("annulus needs 0 < inner < outer");
  const int rings = std::max(1, static_cast<int>(std::lround((outer - inner) / h)));
  std::vector<double> radii;
  for (int k = 0; k <= rings; ++k) radii.push_back(inner + (outer - inner) * k / rings);
  return detail::make_rings(radii, h);
}

}  // namespace frontmesh
