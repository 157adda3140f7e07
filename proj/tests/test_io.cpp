#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "nlrl/io/csv.hpp"
#include "nlrl/io/json.hpp"
#include "nlrl/io/svg.hpp"

using namespace nlrl;
namespace fs = std::filesystem;

namespace {

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("nlrl_io_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string file(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

std::vector<std::string> lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

SweepResult fake_sweep(const std::vector<double>& Us, const std::vector<double>& grid) {
  SweepResult r;
  r.spec.model = ModelKind::A;
  r.spec.gamma_a = 2.0;
  r.spec.U_values = Us;
  r.spec.delta_g_grid = grid;
  for (double U : Us) {
    SweepCurve c{U, {}};
    for (double dg : grid) c.points.push_back({dg, 0.5 + dg + 0.1 * U, 1e-5, false, std::nullopt});
    r.curves.push_back(c);
  }
  return r;
}

}  // namespace

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.3), "0.3");
  EXPECT_EQ(io::format_double(2.0), "2");
  EXPECT_EQ(io::format_double(-1e-300), "-1e-300");
  EXPECT_EQ(io::format_double(std::nan("")), "nan");
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = d(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(io::parse_double(io::format_double(x)), x);
  }
  EXPECT_THROW(io::parse_double("1.0x"), std::invalid_argument);
}

TEST_F(TempDir, SweepCsvRowFormat) {
  SweepSpec spec;
  spec.model = ModelKind::Linear;
  spec.delta_g_grid = {0.3};
  spec.U_values = {0.0};
  spec.sim.N = 60;
  spec.sim.T = 25.0;
  const auto result = run_sweep(spec);
  io::write_sweep_csv(result, file("s.csv"));
  const auto l = lines(file("s.csv"));
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[0], io::kSweepHeader);
  EXPECT_EQ(l[1].rfind("Linear,0.3,0,2,0.99", 0), 0u) << l[1];
  EXPECT_TRUE(l[1].ends_with(",false"));

  const auto rows = io::read_sweep_csv(file("s.csv"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(*rows[0].mean_displacement, result.curves[0].points[0].mean_displacement);
  EXPECT_EQ(*rows[0].residual_norm, result.curves[0].points[0].residual_norm);
}

TEST_F(TempDir, FailedPointsHaveEmptyFields) {
  auto r = fake_sweep({1.0}, {0.1, 0.2});
  r.curves[0].points[1].error = "boom";
  r.curves[0].points[1].mean_displacement = std::nan("");
  io::write_sweep_csv(r, file("f.csv"));
  const auto l = lines(file("f.csv"));
  EXPECT_EQ(l[2], "A,0.2,1,2,,,");
  const auto rows = io::read_sweep_csv(file("f.csv"));
  EXPECT_FALSE(rows[1].mean_displacement.has_value());
  EXPECT_TRUE(rows[0].mean_displacement.has_value());
}

TEST_F(TempDir, EmptySeriesIsHeaderOnly) {
  io::write_displacement_csv(DisplacementSeries{}, file("d.csv"));
  io::write_contrast_csv(ContrastSeries{}, file("z.csv"));
  io::write_occupancy_csv(OccupancyGrid{}, file("o.csv"));
  io::write_sweep_csv(SweepResult{}, file("s.csv"));
  EXPECT_EQ(lines(file("d.csv")), std::vector<std::string>{"t,Delta_m_t"});
  EXPECT_EQ(lines(file("z.csv")), std::vector<std::string>{"t,m,Z_m"});
  EXPECT_EQ(lines(file("o.csv")), std::vector<std::string>{"t,m,occupancy"});
  EXPECT_EQ(lines(file("s.csv")), std::vector<std::string>{std::string(io::kSweepHeader)});
}

TEST_F(TempDir, OccupancyIsLongFormat) {
  SimConfig c;
  c.N = 3;
  c.T = 1.0;
  c.dt = 0.01;
  c.sample_stride = 50;
  const auto run = heatmap_run(make_params(ModelKind::A, 0.1, 1.0, 1.0), c);
  io::write_occupancy_csv(run.occupancy, file("o.csv"));
  const auto l = lines(file("o.csv"));
  ASSERT_EQ(l.size(), 1 + 3 * 7u);
  EXPECT_EQ(l[1], "0,-3,0");
  EXPECT_EQ(l[4], "0,0,1");

  io::write_trajectory_csv(run, file("t.csv"));
  const auto t = lines(file("t.csv"));
  EXPECT_EQ(t[0], io::kTrajectoryHeader);
  EXPECT_EQ(t.size(), 1 + 3 * 7u);
  EXPECT_EQ(t[4], "0,0,0,1," + io::format_double(0.6 - 0.4) + ",0,1");
}

TEST_F(TempDir, UnwritablePathNamesThePath) {
  const std::string bad = file("missing/dir/x.csv");
  try {
    io::write_displacement_csv(DisplacementSeries{}, bad);
    FAIL();
  } catch (const io::IoError& e) {
    EXPECT_EQ(e.path(), bad);
  }
}

TEST(SweepSvg, OnePolylinePerCurveWithLabels) {
  const auto svg = io::sweep_svg(fake_sweep({0.0, 0.5, 3.0, 5.0}, {-0.2, -0.1, 0.0, 0.1}));
  EXPECT_EQ(count(svg, "<polyline"), 4u);
  EXPECT_NE(svg.find(">δg</text>"), std::string::npos);
  EXPECT_NE(svg.find(">⟨Δm⟩</text>"), std::string::npos);
  EXPECT_NE(svg.find("U = 3"), std::string::npos);
  EXPECT_TRUE(svg.starts_with("<svg") || svg.starts_with("<?xml"));
  EXPECT_TRUE(svg.ends_with("</svg>\n"));
}

TEST(SweepSvg, SinglePointGivesOneMarker) {
  const auto svg = io::sweep_svg(fake_sweep({5.0}, {-0.4}));
  EXPECT_EQ(count(svg, "<polyline"), 0u);
  EXPECT_EQ(count(svg, "<circle"), 1u);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_TRUE(svg.ends_with("</svg>\n"));
}

TEST(SweepSvg, FailedPointSplitsCurve) {
  auto r = fake_sweep({1.0}, {-0.2, -0.1, 0.0, 0.1, 0.2});
  r.curves[0].points[2].error = "x";
  r.curves[0].points[2].mean_displacement = std::nan("");
  EXPECT_EQ(count(io::sweep_svg(r), "<polyline"), 2u);
}

TEST(HeatmapSvg, AxisLabels) {
  SimConfig c;
  c.N = 10;
  c.T = 5.0;
  c.sample_stride = 100;
  const auto run = heatmap_run(make_params(ModelKind::C, -0.4, 0.2, 5.0), c);
  for (const auto& data : {io::occupancy_heatmap(run.occupancy), io::contrast_heatmap(run.contrast)}) {
    const auto svg = io::heatmap_svg(data);
    EXPECT_NE(svg.find(">t</text>"), std::string::npos);
    EXPECT_NE(svg.find(">m</text>"), std::string::npos);
    EXPECT_GT(count(svg, "<rect"), 10u);
    EXPECT_TRUE(svg.ends_with("</svg>\n"));
  }
  EXPECT_NO_THROW(io::heatmap_svg(io::HeatmapData{}));
}

TEST(Json, SweepDocument) {
  auto r = fake_sweep({0.0, 3.0}, {0.1});
  r.curves[1].points[0].error = "diverged";
  r.curves[1].points[0].mean_displacement = std::nan("");
  const auto doc = io::to_json(r);
  EXPECT_EQ(doc["model"], "A");
  EXPECT_EQ(doc["curves"].size(), 2u);
  EXPECT_TRUE(doc["curves"][1]["points"][0]["mean_displacement"].is_null());
  EXPECT_EQ(doc["errors"].size(), 1u);
  EXPECT_FALSE(doc.contains("timestamp"));
}

TEST(Json, MetadataCarriesVersion) {
  const auto doc = io::to_json(io::RunMetadata{1e-3, 25.0, 60, 1.5, "2026-01-01T00:00:00Z"});
  EXPECT_EQ(doc["engine_version"], std::string(kEngineVersion));
  EXPECT_EQ(doc["N"], 60);
}
