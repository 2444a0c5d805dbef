#pragma once

#include <iosfwd>
#include <string>

#include "dualq/geometry.hpp"

namespace dualq {

struct SvgOptions {
  std::string title;
  bool show_edges = true;
  bool show_hull = false;
  int size = 600;
};

// Scatter of a 2D grid with its Delaunay edges. Throws std::invalid_argument
// for grids that are not two-dimensional.
void write_svg(std::ostream& out, const Grid& grid, const SvgOptions& options = {});

// Writes path (SVG) and path with ".csv" appended: one row per point with x, y.
void export_svg(const std::string& path, const Grid& grid, const SvgOptions& options = {});

}  // namespace dualq
