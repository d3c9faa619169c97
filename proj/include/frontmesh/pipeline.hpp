#pragma once

// End-to-end driver: load, field, generate, triangulate, optimize, recombine,
// export, report.

#include <algorithm>
#include <array>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "frontmesh/direction_field.hpp"
#include "frontmesh/frontal_insertion.hpp"
#include "frontmesh/mesh_io.hpp"
#include "frontmesh/quad_quality.hpp"
#include "frontmesh/recombine.hpp"
#include "frontmesh/size_field.hpp"
#include "frontmesh/triangulator.hpp"

namespace frontmesh {

struct SizeSpec {
  bool graded = false;
  double h = 0.05;  // constant size
  double h_min = 0.0, h_max = 0.0, rate = 0.0;
};

struct RunConfig {
  std::filesystem::path input;
  std::filesystem::path output;         // empty: no mesh written
  std::vector<std::string> formats;     // obj, vtk, off; empty: from the output extension
  int order = 6;
  double alpha = 0.75;
  SizeSpec size;
  std::optional<FilterNorm> norm;       // default follows the order
  int workers = 1;
  std::optional<bool> optimize;         // default: on for order 4
  int opt_sweeps = 20;
  bool recombine = false;
  double quad_threshold = 0.3;
  SeedOrdering seed_ordering = SeedOrdering::Topological;
  std::filesystem::path dump_field;     // empty: no dump
  std::filesystem::path stats;          // empty: report on stdout
};

/// Error raised by run(): names the failing stage and carries the exit code.
class StageError : public Error {
 public:
  StageError(std::string stage, int exit_code, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)), exit_code_(exit_code) {}
  const std::string& stage() const { return stage_; }
  int exit_code() const { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitAlgorithm = 3;

inline bool optimize_enabled(const RunConfig& c) { return c.optimize.value_or(c.order == 4); }

inline void validate(const RunConfig& c) {
  if (!is_valid_order(c.order)) throw ConfigError("order must be 4 or 6");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (c.workers < 1) throw ConfigError("workers must be at least 1");
  if (c.order == 6 && c.recombine) throw ConfigError("recombination needs a cross field (--order 4)");
  if (c.order == 6 && c.optimize.value_or(false))
    throw ConfigError("optimization uses the cross-field quality (--order 4)");
  if (c.opt_sweeps < 0) throw ConfigError("optimization sweeps must be non-negative");
  if (!(c.quad_threshold >= 0.0 && c.quad_threshold <= 1.0)) throw ConfigError("quad threshold must lie in [0, 1]");
  if (c.size.graded) {
    if (!(c.size.h_min > 0.0) || !(c.size.h_max >= c.size.h_min) || !(c.size.rate >= 0.0))
      throw ConfigError("graded size needs 0 < HMIN <= HMAX and G >= 0");
  } else if (!(c.size.h > 0.0)) {
    throw ConfigError("size must be positive");
  }
  if (c.input.empty()) throw ConfigError("an input mesh is required");
  for (const std::string& f : c.formats)
    if (f != "obj" && f != "vtk" && f != "off") throw ConfigError("unknown output format '" + f + "'");
  if (!c.formats.empty() && c.output.empty()) throw ConfigError("output formats given without an output path");
}

using Histogram = std::array<std::size_t, 10>;

inline Histogram histogram(const std::vector<double>& values) {
  Histogram h{};
  for (double v : values) h[static_cast<std::size_t>(std::clamp(static_cast<int>(v * 10.0), 0, 9))]++;
  return h;
}

struct RunReport {
  std::size_t point_count = 0;
  std::size_t triangle_count = 0;  // before recombination
  double generation_seconds = 0.0;
  double total_seconds = 0.0;
  InsertionStats insertion;
  int workers = 1;
  double gamma_mean = 0.0, gamma_min = 0.0;
  Histogram gamma_histogram{};
  std::optional<double> qt_mean, qt_min;
  std::optional<Histogram> qt_histogram;
  bool optimized = false;
  OptimizeReport optimization;
  bool recombined = false;
  std::size_t quad_count = 0;
  double quad_mean_quality = 0.0, quad_min_quality = 0.0;
  std::size_t nonconvex_quads = 0;
  std::size_t leftover_triangles = 0;
  std::vector<std::filesystem::path> written;
};

inline nlohmann::ordered_json to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["point_count"] = r.point_count;
  j["triangle_count"] = r.triangle_count;
  j["generation_seconds"] = r.generation_seconds;
  j["total_seconds"] = r.total_seconds;
  j["mean_walk_length"] = r.insertion.mean_walk_length();
  j["rejection_rate"] = r.insertion.rejection_rate();
  j["insertion"] = {{"workers", r.workers},
                    {"seeds", r.insertion.seeds},
                    {"candidates", r.insertion.candidates},
                    {"walks_found", r.insertion.walks_found},
                    {"walks_hit_boundary", r.insertion.walks_hit_boundary},
                    {"walks_step_limit", r.insertion.walks_step_limit},
                    {"walks_no_intersection", r.insertion.walks_no_intersection},
                    {"rejected", r.insertion.rejected},
                    {"rejected_in_commit", r.insertion.rejected_in_commit}};
  j["gamma_mean"] = r.gamma_mean;
  j["gamma_min"] = r.gamma_min;
  j["gamma_histogram"] = r.gamma_histogram;
  j["qt_mean"] = r.qt_mean ? nlohmann::ordered_json(*r.qt_mean) : nlohmann::ordered_json();
  j["qt_min"] = r.qt_min ? nlohmann::ordered_json(*r.qt_min) : nlohmann::ordered_json();
  j["qt_histogram"] = r.qt_histogram ? nlohmann::ordered_json(*r.qt_histogram) : nlohmann::ordered_json();
  j["optimization"] = {{"enabled", r.optimized},
                       {"sweeps", r.optimization.sweeps},
                       {"relocations", r.optimization.relocations.size()},
                       {"converged", r.optimization.converged}};
  j["quads"] = {{"enabled", r.recombined},
                {"count", r.quad_count},
                {"mean_quality", r.quad_mean_quality},
                {"min_quality", r.quad_min_quality},
                {"nonconvex", r.nonconvex_quads}};
  j["leftover_triangles"] = r.leftover_triangles;
  return j;
}

namespace detail {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError& e) {
    throw StageError(name, kExitConfig, e.what());
  } catch (const IoError& e) {
    throw StageError(name, kExitIo, e.what());
  } catch (const std::exception& e) {
    throw StageError(name, kExitAlgorithm, e.what());
  }
}

}  // namespace detail

/// Runs the whole pipeline. Throws StageError on failure.
inline RunReport run(const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  detail::stage("config", [&] { validate(config); });
  RunReport rep;
  rep.workers = config.workers;

  const SurfaceMesh base = [&] {
    try {
      return load_mesh(config.input);
    } catch (const MeshError& e) {
      throw StageError("load", kExitIo, e.what());
    } catch (const IoError& e) {
      throw StageError("load", kExitIo, e.what());
    }
  }();
  const DirectionField field = detail::stage("field", [&] { return compute_field(base, config.order); });
  if (!config.dump_field.empty()) {
    detail::stage("dump-field", [&] {
      std::ofstream out(config.dump_field);
      if (!out) throw IoError("cannot write '" + config.dump_field.string() + "'");
      write_field_csv(out, field);
    });
  }
  const SizeField size = detail::stage("size", [&] {
    return config.size.graded ? SizeField::graded(base, config.size.h_min, config.size.h_max, config.size.rate)
                              : SizeField::constant(config.size.h);
  });

  const InsertionResult gen = detail::stage("generate", [&] {
    InsertionOptions opt;
    opt.alpha = config.alpha;
    opt.norm = config.norm;
    opt.workers = config.workers;
    opt.seed_ordering = config.seed_ordering;
    return generate_points(base, field, size, opt);
  });
  rep.point_count = gen.points.size();
  rep.insertion = gen.stats;
  rep.generation_seconds = gen.stats.seconds;

  OutputMesh out = detail::stage("triangulate", [&] { return triangulate(base, gen.points); });
  rep.triangle_count = out.triangles.size();

  if (optimize_enabled(config)) {
    rep.optimized = true;
    rep.optimization = detail::stage("optimize", [&] {
      OptimizeOptions opt;
      opt.max_sweeps = config.opt_sweeps;
      return optimize_cavities(out, field, base, opt);
    });
  }

  std::vector<double> tri_quality;
  detail::stage("quality", [&] {
    std::vector<double> gamma;
    for (const Tri& t : out.triangles)
      gamma.push_back(radius_ratio(out.vertices[static_cast<std::size_t>(t[0])], out.vertices[static_cast<std::size_t>(t[1])],
                                   out.vertices[static_cast<std::size_t>(t[2])]));
    if (!gamma.empty()) {
      double s = 0.0;
      for (double g : gamma) s += g;
      rep.gamma_mean = s / static_cast<double>(gamma.size());
      rep.gamma_min = *std::min_element(gamma.begin(), gamma.end());
    }
    rep.gamma_histogram = histogram(gamma);
    tri_quality = gamma;
    if (config.order == 4 && !out.triangles.empty()) {
      std::vector<double> qt;
      for (Index t = 0; t < static_cast<Index>(out.triangles.size()); ++t)
        qt.push_back(right_angled_quality(out, t, field, base).qt);
      double s = 0.0;
      for (double q : qt) s += q;
      rep.qt_mean = s / static_cast<double>(qt.size());
      rep.qt_min = *std::min_element(qt.begin(), qt.end());
      rep.qt_histogram = histogram(qt);
      tri_quality = qt;
    }
  });

  std::vector<Tri> cells_tri;
  std::vector<std::array<Index, 4>> cells_quad;
  std::vector<double> cell_quality;
  if (config.recombine) {
    rep.recombined = true;
    const RecombineResult r = detail::stage("recombine", [&] { return recombine(out, config.quad_threshold); });
    rep.quad_count = r.quads.size();
    rep.quad_mean_quality = r.mean_quality;
    rep.quad_min_quality = r.min_quality;
    rep.nonconvex_quads = r.nonconvex;
    rep.leftover_triangles = r.leftover.size();
    for (Index t : r.leftover) {
      cells_tri.push_back(out.triangles[static_cast<std::size_t>(t)]);
      cell_quality.push_back(tri_quality[static_cast<std::size_t>(t)]);
    }
    for (const QuadElement& q : r.quads) cells_quad.push_back(q.v);
    for (const QuadElement& q : r.quads) cell_quality.push_back(q.quality);
  } else {
    cells_tri = out.triangles;
    cell_quality = tri_quality;
    rep.leftover_triangles = out.triangles.size();
  }

  if (!config.output.empty()) {
    detail::stage("export", [&] {
      std::vector<std::string> formats = config.formats;
      if (formats.empty()) {
        std::string ext = config.output.extension().string();
        if (!ext.empty()) ext.erase(0, 1);
        for (char& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        formats.push_back(ext == "vtk" || ext == "off" ? ext : "obj");
      }
      const PolyView view{out.vertices, cells_tri, cells_quad, cell_quality};
      for (const std::string& f : formats) {
        std::filesystem::path p = config.output;
        if (config.formats.size() > 1 || p.extension().empty()) p.replace_extension("." + f);
        std::ofstream file(p);
        if (!file) throw IoError("cannot write '" + p.string() + "'");
        if (f == "vtk")
          write_vtk(file, view);
        else if (f == "off")
          write_off(file, view);
        else
          write_obj(file, view);
        if (!file) throw IoError("failed writing '" + p.string() + "'");
        rep.written.push_back(p);
      }
    });
  }
  rep.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace frontmesh
