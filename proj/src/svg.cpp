#include "dualq/svg.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "dualq/delaunay2d.hpp"
#include "dualq/grid_io.hpp"

namespace dualq {
namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_svg(std::ostream& out, const Grid& grid, const SvgOptions& options) {
  if (grid.dim() != 2) throw std::invalid_argument("SVG export needs a 2D grid");
  if (grid.size() == 0) throw std::invalid_argument("SVG export needs a non-empty grid");
  Eigen::Vector2d lo = grid[0], hi = grid[0];
  for (const auto& p : grid.points()) {
    lo = lo.cwiseMin(Eigen::Vector2d(p));
    hi = hi.cwiseMax(Eigen::Vector2d(p));
  }
  const double span = std::max({hi(0) - lo(0), hi(1) - lo(1), 1e-12});
  const double margin = 30.0;
  const double scale = (options.size - 2.0 * margin) / span;
  auto sx = [&](double x) { return margin + (x - lo(0)) * scale; };
  auto sy = [&](double y) { return options.size - margin - (y - lo(1)) * scale; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.size << "\" height=\""
      << options.size << "\" viewBox=\"0 0 " << options.size << ' ' << options.size << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    out << "<text x=\"" << options.size / 2 << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"14\">" << escape(options.title) << "</text>\n";
  }
  std::optional<Triangulation> tri;
  if ((options.show_edges || options.show_hull) && grid.size() >= 3) {
    try {
      tri = triangulate(grid);
    } catch (const std::exception&) {
      tri.reset();
    }
  }
  if (tri && options.show_edges) {
    out << "<g class=\"edges\" stroke=\"#4a6fa5\" stroke-width=\"1\">\n";
    for (const auto& [a, b] : tri->edges()) {
      out << "<line x1=\"" << sx(grid[a](0)) << "\" y1=\"" << sy(grid[a](1)) << "\" x2=\""
          << sx(grid[b](0)) << "\" y2=\"" << sy(grid[b](1)) << "\"/>\n";
    }
    out << "</g>\n";
  }
  if (tri && options.show_hull) {
    out << "<g class=\"hull\" stroke=\"#c0392b\" stroke-width=\"2\">\n";
    for (Index t = 0; t < tri->triangles().size(); ++t) {
      for (int k = 0; k < 3; ++k) {
        if (tri->neighbors()[t][k] >= 0) continue;
        const Index a = tri->triangles()[t][(k + 1) % 3];
        const Index b = tri->triangles()[t][(k + 2) % 3];
        out << "<line x1=\"" << sx(grid[a](0)) << "\" y1=\"" << sy(grid[a](1)) << "\" x2=\""
            << sx(grid[b](0)) << "\" y2=\"" << sy(grid[b](1)) << "\"/>\n";
      }
    }
    out << "</g>\n";
  }
  out << "<g class=\"points\" fill=\"black\">\n";
  for (const auto& p : grid.points()) {
    out << "<circle cx=\"" << sx(p(0)) << "\" cy=\"" << sy(p(1)) << "\" r=\"3\"/>\n";
  }
  out << "</g>\n</svg>\n";
}

void export_svg(const std::string& path, const Grid& grid, const SvgOptions& options) {
  std::ofstream svg(path);
  if (!svg) throw std::invalid_argument("cannot write " + path);
  write_svg(svg, grid, options);
  std::ofstream csv(path + ".csv");
  if (!csv) throw std::invalid_argument("cannot write " + path + ".csv");
  write_grid_csv(csv, grid);
}

}  // namespace dualq
