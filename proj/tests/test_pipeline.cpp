#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "frontmesh/fixtures.hpp"
#include "frontmesh/pipeline.hpp"

using namespace frontmesh;
namespace fs = std::filesystem;

namespace {

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("frontmesh_pipeline_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    square_ = dir_ / "square.obj";
    save_mesh(square_, make_grid(10, 10));
  }
  void TearDown() override { fs::remove_all(dir_); }

  RunConfig config(int order) const {
    RunConfig c;
    c.input = square_;
    c.order = order;
    c.size.h = 0.1;
    return c;
  }

  static int cli(const std::string& args) {
    const std::string cmd = std::string(FRONTMESH_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_, square_;
};

}  // namespace

TEST_F(PipelineTest, ValidationRejectsInconsistentConfigs) {
  RunConfig c = config(6);
  c.recombine = true;
  EXPECT_THROW(validate(c), ConfigError);
  c = config(6);
  c.optimize = true;
  EXPECT_THROW(validate(c), ConfigError);
  c = config(5);
  EXPECT_THROW(validate(c), ConfigError);
  c = config(4);
  c.workers = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = config(4);
  c.alpha = 1.0;
  EXPECT_THROW(validate(c), ConfigError);
  c = config(4);
  c.size = {true, 0.0, 0.2, 0.1, 0.5};
  EXPECT_THROW(validate(c), ConfigError);
  c = config(4);
  c.output = dir_ / "x";
  c.formats = {"stl"};
  EXPECT_THROW(validate(c), ConfigError);
  EXPECT_NO_THROW(validate(config(4)));
}

TEST_F(PipelineTest, AsteriskRunIsTriangular) {
  RunConfig c = config(6);
  c.output = dir_ / "tri.obj";
  const RunReport r = run(c);
  EXPECT_GT(r.point_count, 100u);
  EXPECT_GT(r.gamma_mean, 0.9);
  EXPECT_GT(r.gamma_min, 0.0);
  EXPECT_EQ(r.quad_count, 0u);
  EXPECT_FALSE(r.optimized);
  EXPECT_FALSE(r.qt_histogram.has_value());
  EXPECT_EQ(r.leftover_triangles, r.triangle_count);
  const SurfaceMesh back = load_mesh(c.output);
  EXPECT_EQ(static_cast<std::size_t>(back.num_vertices()), r.point_count);
  EXPECT_EQ(static_cast<std::size_t>(back.num_triangles()), r.triangle_count);
}

TEST_F(PipelineTest, CrossRunWithRecombinationIsQuadDominant) {
  RunConfig c = config(4);
  c.recombine = true;
  c.output = dir_ / "quad.vtk";
  const RunReport r = run(c);
  EXPECT_TRUE(r.optimized);
  EXPECT_GE(2 * r.quad_count, 4 * r.triangle_count / 5);
  EXPECT_EQ(2 * r.quad_count + r.leftover_triangles, r.triangle_count);
  EXPECT_GT(r.quad_mean_quality, 0.85);
  ASSERT_TRUE(r.qt_histogram.has_value());
  std::size_t total = 0;
  for (std::size_t n : *r.qt_histogram) total += n;
  EXPECT_EQ(total, r.triangle_count);
  const std::string vtk = slurp(c.output);
  EXPECT_NE(vtk.find("POLYGONS " + std::to_string(r.quad_count + r.leftover_triangles)), std::string::npos);
  EXPECT_NE(vtk.find("CELL_DATA"), std::string::npos);
}

TEST_F(PipelineTest, ReportSchema) {
  const auto j = to_json(run(config(4)));
  for (const char* key : {"point_count", "triangle_count", "generation_seconds", "total_seconds", "mean_walk_length",
                          "rejection_rate", "insertion", "gamma_mean", "gamma_min", "gamma_histogram", "qt_mean",
                          "qt_min", "qt_histogram", "optimization", "quads", "leftover_triangles"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["gamma_histogram"].size(), 10u);
  EXPECT_EQ(j["quads"]["count"], 0);
  EXPECT_TRUE(to_json(run(config(6)))["qt_histogram"].is_null());
}

TEST_F(PipelineTest, StageErrorsCarryExitCodes) {
  try {
    detail::stage("generate", [] { throw AlgorithmError("boom"); });
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.exit_code(), kExitAlgorithm);
    EXPECT_EQ(e.stage(), "generate");
    EXPECT_NE(std::string(e.what()).find("generate: boom"), std::string::npos);
  }
  RunConfig c = config(4);
  c.input = dir_ / "missing.obj";
  try {
    run(c);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.exit_code(), kExitIo);
    EXPECT_EQ(e.stage(), "load");
  }
}

TEST_F(PipelineTest, CliExitCodes) {
  const std::string in = square_.string();
  EXPECT_EQ(cli("--input " + in + " --order 6 --size-const 0.1 --stats " + (dir_ / "s.json").string()), 0);
  EXPECT_EQ(cli("--input " + in + " --order 6 --recombine on"), 1);
  EXPECT_EQ(cli("--input " + in + " --order 4 --norm l3"), 1);
  EXPECT_EQ(cli("--input " + in + " --size-graded 0.1,0.2"), 1);
  EXPECT_EQ(cli("--input " + in + " --workers 0"), 1);
  EXPECT_EQ(cli("--input " + in + " --no-such-flag"), 1);
  EXPECT_EQ(cli("--input " + (dir_ / "missing.obj").string()), 2);
  {
    std::ofstream bad(dir_ / "bad.obj");
    bad << "v 0 0 0\nv 1 0 0\nf 1 2 7\n";
  }
  EXPECT_EQ(cli("--input " + (dir_ / "bad.obj").string()), 2);
  EXPECT_EQ(cli("--input " + in + " --output " + (dir_ / "no_dir" / "x.obj").string()), 2);
  const auto j = nlohmann::json::parse(slurp(dir_ / "s.json"));
  EXPECT_GT(j["point_count"].get<int>(), 100);
}

TEST_F(PipelineTest, CliOutputIsByteIdenticalWithOneWorker) {
  const std::string base = "--input " + square_.string() + " --order 4 --size-const 0.07 --recombine on --workers 1 ";
  ASSERT_EQ(cli(base + "--output " + (dir_ / "a.vtk").string() + " --stats " + (dir_ / "a.json").string()), 0);
  ASSERT_EQ(cli(base + "--output " + (dir_ / "b.vtk").string() + " --stats " + (dir_ / "b.json").string()), 0);
  const std::string a = slurp(dir_ / "a.vtk");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "b.vtk"));
}

TEST_F(PipelineTest, CliWritesFormatsAndFieldDump) {
  ASSERT_EQ(cli("--input " + square_.string() + " --order 4 --size-const 0.1 --format obj,vtk --output " +
                (dir_ / "m").string() + " --dump-field " + (dir_ / "f.csv").string() + " --stats " +
                (dir_ / "s.json").string()),
            0);
  EXPECT_TRUE(fs::exists(dir_ / "m.obj"));
  EXPECT_TRUE(fs::exists(dir_ / "m.vtk"));
  std::ifstream csv(dir_ / "f.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "vertex,theta,order");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 121);
}

TEST_F(PipelineTest, FixtureGeneratorRoundTrips) {
  const fs::path out = dir_ / "sphere.off";
  const std::string cmd = std::string(FRONTMESH_FIXTUREGEN) + " icosphere --subdivisions 2 -o " + out.string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  const SurfaceMesh m = load_mesh(out);
  EXPECT_EQ(m.num_triangles(), 320);
  EXPECT_FALSE(m.has_boundary());
}
