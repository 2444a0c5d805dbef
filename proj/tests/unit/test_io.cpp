#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "dualq/delaunay2d.hpp"
#include "dualq/grid_io.hpp"
#include "dualq/svg.hpp"
#include "helpers.hpp"

using namespace dualq;
using testutil::pt;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("dualq_test_" + name)).string();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("grid_io") {
  TEST_CASE("CSV round trip is exact") {
    RngStream rng(1);
    const Grid g = testutil::random_grid(rng, 30, 3);
    std::stringstream ss;
    write_grid_csv(ss, g);
    const Grid back = read_grid_csv(ss);
    REQUIRE(back.size() == g.size());
    for (Index i = 0; i < g.size(); ++i) CHECK(back[i] == g[i]);
    std::stringstream plain("0.5,1\n2,3\n");
    CHECK(read_grid_csv(plain).size() == 2);
    std::stringstream bad("0.5,1\n2\n");
    CHECK_THROWS_AS(read_grid_csv(bad), std::invalid_argument);
  }

  TEST_CASE("JSON round trip keeps pins and metadata") {
    RngStream rng(2);
    const Grid g(testutil::random_grid(rng, 10, 2).points(), {0, 3});
    const std::string path = temp_path("grid.json");
    save_grid(path, g, GridMeta{"uniform2d", 2.0, "l2"});
    const GridFile f = load_grid(path);
    REQUIRE(f.meta.has_value());
    CHECK(f.meta->distribution == "uniform2d");
    CHECK(f.grid.pinned() == std::vector<Index>{0, 3});
    for (Index i = 0; i < g.size(); ++i) CHECK(f.grid[i] == g[i]);
    std::remove(path.c_str());
    std::stringstream bad(R"({"dim": 2, "n": 3, "points": [[0, 1]]})");
    CHECK_THROWS_AS(read_grid_json(bad), std::invalid_argument);
  }

  TEST_CASE("SVG export") {
    std::vector<Point> pts;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) pts.push_back(pt({i / 3.0 + 0.01 * j * j, j / 3.0 + 0.013 * i}));
    const Grid g(pts);
    std::stringstream ss;
    write_svg(ss, g, SvgOptions{"grid", true, true, 400});
    const std::string svg = ss.str();
    CHECK(count(svg, "<circle") == 16);
    const std::size_t edges = triangulate(g).edges().size();
    const auto start = svg.find("class=\"edges\"");
    const auto stop = svg.find("</g>", start);
    CHECK(count(svg.substr(start, stop - start), "<line") == edges);
    std::stringstream one;
    CHECK_THROWS_AS(write_svg(one, testutil::grid1d({0, 1})), std::invalid_argument);
    const std::string path = temp_path("plot.svg");
    export_svg(path, g);
    CHECK(std::filesystem::exists(path + ".csv"));
    std::remove(path.c_str());
    std::remove((path + ".csv").c_str());
  }
}
