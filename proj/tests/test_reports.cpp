#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "phmp/error.hpp"
#include "phmp/models.hpp"
#include "phmp/report.hpp"
#include "phmp/scenarios.hpp"
#include "phmp/svg.hpp"

using namespace phmp;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Report, ExitCodePrecedence) {
  Report r;
  EXPECT_EQ(r.exit_code(), 0);
  r.add({"a", Status::pass, {{"N", 1}}, {}});
  EXPECT_EQ(r.exit_code(), 0);
  r.add({"b", Status::fail, {{"N", 1}}, {}});
  EXPECT_EQ(r.exit_code(), 1);
  r.add({"c", Status::inconclusive, {{"N", 1}}, {}});
  EXPECT_EQ(r.exit_code(), 2);
}

TEST(Report, ConfigHashIsStableAndKeyOrderFree) {
  auto a = nlohmann::json::parse(R"({"b": 1, "a": [1, 2]})");
  auto b = nlohmann::json::parse(R"({"a": [1, 2], "b": 1})");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(nlohmann::json{{"a", 1}}));
  // FNV-1a of "{}"
  EXPECT_EQ(hex64(config_hash(nlohmann::json::object())), "08f44b07b5901a25");
}

TEST(Report, JsonHasNoTimings) {
  Report r;
  r.timings["x"] = 1.5;
  r.add({"a", Status::pass, {{"N", 4}}, {}});
  auto j = to_json(r);
  EXPECT_FALSE(j.contains("timings"));
  EXPECT_EQ(j["verdicts"][0]["scale"]["N"], 4);
  EXPECT_EQ(timings_json(r)["x"], 1.5);
}

TEST(Scenario, UnknownNameIsUsageError) {
  try {
    run_scenario("nonexistent");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::usage);
  }
}

TEST(Scenario, EveryVerdictCarriesScale) {
  for (const char* n : {"flex-reference-path", "segment-growth", "hamiltonian-families"}) {
    auto r = run_scenario(n);
    ASSERT_FALSE(r.verdicts.empty());
    for (const auto& v : r.verdicts) EXPECT_FALSE(v.scale.empty()) << n << " " << v.name;
    EXPECT_EQ(r.exit_code(), 0) << n;
  }
}

TEST(Scenario, ReportsAreReproducible) {
  auto dir = std::filesystem::temp_directory_path() / "phmp-repro";
  std::filesystem::remove_all(dir);
  ScenarioContext a{(dir / "a").string(), 3, {}}, b{(dir / "b").string(), 3, {}};
  for (const char* n : {"volume-hyperbolicity", "unique-quasi-attractor"}) {
    run_scenario(n, a);
    run_scenario(n, b);
    EXPECT_EQ(slurp(dir / "a" / n / "report.json"), slurp(dir / "b" / n / "report.json")) << n;
  }
  EXPECT_EQ(slurp(dir / "a" / "unique-quasi-attractor" / "attractor-theta0.svg"),
            slurp(dir / "b" / "unique-quasi-attractor" / "attractor-theta0.svg"));
  std::filesystem::remove_all(dir);
}

TEST(Scenario, ParallelRunMatchesSequential) {
  std::vector<std::string> names{"flex-reference-path", "hamiltonian-families", "segment-growth"};
  auto seq = run_scenarios(names, {}, 1);
  auto par = run_scenarios(names, {}, 3);
  for (std::size_t i = 0; i < names.size(); ++i) EXPECT_EQ(to_json(seq[i]), to_json(par[i]));
}

TEST(Svg, EmptyPlotStillHasAxes) {
  auto f = make_model("solenoid");
  SlicePlot p(f->chart().domain, {0, 0.5}, "empty");
  EXPECT_TRUE(p.empty());
  auto s = p.render();
  EXPECT_NE(s.find("empty slice"), std::string::npos);
  EXPECT_NE(s.find("stroke=\"black\""), std::string::npos);
  EXPECT_EQ(s.find("<polyline"), std::string::npos);
}

TEST(Svg, PlaneOutsideDomain) {
  auto f = make_model("solenoid");
  try {
    SlicePlot p(f->chart().domain, {2, 3.0}, "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_parameters);
  }
}

TEST(Svg, OrderIndependent) {
  BoxGrid g = make_grid(Box3{{-1, -1, -1}, {1, 1, 1}}, 4);
  BoxSet s1{g, {g.index(0, 0, 2), g.index(1, 2, 2), g.index(3, 3, 2)}};
  BoxSet s2{g, {g.index(3, 3, 2)}}, s3{g, {g.index(0, 0, 2), g.index(1, 2, 2)}};
  SlicePlot a(g.box, {2, 0.1}, "t"), b(g.box, {2, 0.1}, "t");
  a.add_boxes(s1, "#111", "all");
  b.add_boxes(s2, "#111", "all");
  b.add_boxes(s3, "#111", "all");
  // same rectangles, different insertion order; legends differ so compare the rect lines only
  auto rects = [](const std::string& svg) {
    std::string out;
    std::stringstream ss(svg);
    for (std::string line; std::getline(ss, line);)
      if (line.rfind("<rect", 0) == 0) out += line + "\n";
    return out;
  };
  auto ra = rects(a.render());
  EXPECT_EQ(ra, rects(b.render()));
  EXPECT_EQ(std::count(ra.begin(), ra.end(), '\n'), 4);  // frame + 3 cells
}
