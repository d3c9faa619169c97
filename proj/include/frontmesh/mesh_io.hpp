#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "frontmesh/mesh_core.hpp"

namespace frontmesh {

enum class MeshFormat { Obj, Off };

inline MeshFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".obj") return MeshFormat::Obj;
  if (ext == ".off") return MeshFormat::Off;
  throw IoError("cannot infer mesh format from '" + path.string() + "' (expected .obj or .off)");
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline void fan(std::vector<Tri>& tris, const std::vector<Index>& poly, std::size_t line) {
  if (poly.size() < 3) throw IoError("face with fewer than 3 vertices at line " + std::to_string(line));
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) tris.push_back({poly[0], poly[k], poly[k + 1]});
}

}  // namespace detail

/// Parses Wavefront OBJ `v` and `f` records. Face entries may carry
/// texture/normal references (`a/b/c`) and negative relative indices.
inline SurfaceMesh read_obj(std::istream& in) {
  std::vector<Vec3> verts;
  std::vector<Tri> tris;
  std::string line;
  std::size_t lineno = 0;
  std::vector<Index> poly;
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = detail::trim(line);
    if (s.empty() || s.front() == '#') continue;
    std::istringstream ls{std::string(s)};
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x >> p.y >> p.z)) throw IoError("malformed vertex at line " + std::to_string(lineno));
      verts.push_back(p);
    } else if (tag == "f") {
      poly.clear();
      std::string tok;
      while (ls >> tok) {
        const auto slash = tok.find('/');
        const std::string_view idx = std::string_view(tok).substr(0, slash);
        long value = 0;
        const auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), value);
        if (ec != std::errc{} || ptr != idx.data() + idx.size() || value == 0)
          throw IoError("malformed face index '" + tok + "' at line " + std::to_string(lineno));
        const long resolved = value > 0 ? value - 1 : static_cast<long>(verts.size()) + value;
        if (resolved < 0) throw IoError("face index out of range at line " + std::to_string(lineno));
        poly.push_back(static_cast<Index>(resolved));
      }
      detail::fan(tris, poly, lineno);
    }
  }
  return SurfaceMesh(std::move(verts), std::move(tris));
}

/// Parses an OFF file: header, counts, vertex block, face block.
inline SurfaceMesh read_off(std::istream& in) {
  // Tokenise with comments stripped.
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  std::size_t pos = 0;
  auto next = [&]() -> const std::string& {
    if (pos >= tokens.size()) throw IoError("unexpected end of OFF data");
    return tokens[pos++];
  };
  auto number = [&](auto& out) {
    const std::string& tok = next();
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) throw IoError("malformed OFF token '" + tok + "'");
  };

  std::string header = next();
  if (header.rfind("OFF", 0) != 0) throw IoError("missing OFF header");
  if (header.size() > 3) throw IoError("unsupported OFF header '" + header + "'");
  long nv = 0, nf = 0, ne = 0;
  number(nv);
  number(nf);
  number(ne);
  if (nv < 0 || nf < 0) throw IoError("negative OFF counts");

  std::vector<Vec3> verts(static_cast<std::size_t>(nv));
  for (auto& p : verts) {
    number(p.x);
    number(p.y);
    number(p.z);
  }
  std::vector<Tri> tris;
  std::vector<Index> poly;
  for (long f = 0; f < nf; ++f) {
    long n = 0;
    number(n);
    if (n < 0) throw IoError("negative face size in OFF");
    poly.assign(static_cast<std::size_t>(n), 0);
    for (auto& v : poly) number(v);
    detail::fan(tris, poly, static_cast<std::size_t>(f + 1));
  }
  return SurfaceMesh(std::move(verts), std::move(tris));
}

inline SurfaceMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return format == MeshFormat::Obj ? read_obj(in) : read_off(in);
}

inline SurfaceMesh load_mesh(const std::filesystem::path& path) { return load_mesh(path, format_from_path(path)); }

/// Polygonal output: triangles and quads over a shared vertex array.
struct PolyView {
  std::span<const Vec3> vertices;
  std::span<const Tri> triangles;
  std::span<const std::array<Index, 4>> quads;
  /// Optional per-cell scalar, triangles first then quads.
  std::span<const double> cell_quality;
};

inline void write_obj(std::ostream& out, const PolyView& mesh) {
  out << std::setprecision(17);
  for (const Vec3& p : mesh.vertices) out << "v " << p.x << ' ' << p.y << ' ' << p.z << '\n';
  for (const Tri& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  for (const auto& q : mesh.quads)
    out << "f " << q[0] + 1 << ' ' << q[1] + 1 << ' ' << q[2] + 1 << ' ' << q[3] + 1 << '\n';
}

inline void write_off(std::ostream& out, const PolyView& mesh) {
  out << std::setprecision(17) << "OFF\n"
      << mesh.vertices.size() << ' ' << mesh.triangles.size() + mesh.quads.size() << " 0\n";
  for (const Vec3& p : mesh.vertices) out << p.x << ' ' << p.y << ' ' << p.z << '\n';
  for (const Tri& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& q : mesh.quads) out << "4 " << q[0] << ' ' << q[1] << ' ' << q[2] << ' ' << q[3] << '\n';
}

/// Legacy ASCII VTK POLYDATA with triangle and quad cells.
inline void write_vtk(std::ostream& out, const PolyView& mesh, std::string_view title = "frontmesh output") {
  out << std::setprecision(17);
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << mesh.vertices.size() << " double\n";
  for (const Vec3& p : mesh.vertices) out << p.x << ' ' << p.y << ' ' << p.z << '\n';
  const std::size_t cells = mesh.triangles.size() + mesh.quads.size();
  out << "POLYGONS " << cells << ' ' << 4 * mesh.triangles.size() + 5 * mesh.quads.size() << '\n';
  for (const Tri& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& q : mesh.quads) out << "4 " << q[0] << ' ' << q[1] << ' ' << q[2] << ' ' << q[3] << '\n';
  if (!mesh.cell_quality.empty()) {
    if (mesh.cell_quality.size() != cells) throw IoError("cell quality size does not match cell count");
    out << "CELL_DATA " << cells << "\nSCALARS quality double 1\nLOOKUP_TABLE default\n";
    for (double q : mesh.cell_quality) out << q << '\n';
  }
}

inline void save_mesh(const std::filesystem::path& path, const PolyView& mesh) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  auto ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".vtk")
    write_vtk(out, mesh);
  else if (ext == ".off")
    write_off(out, mesh);
  else
    write_obj(out, mesh);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline void save_mesh(const std::filesystem::path& path, const SurfaceMesh& mesh) {
  save_mesh(path, PolyView{mesh.vertices(), mesh.triangles(), {}, {}});
}

}  // namespace frontmesh
