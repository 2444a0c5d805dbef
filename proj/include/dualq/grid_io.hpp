#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "dualq/geometry.hpp"

namespace dualq {

struct GridMeta {
  std::string distribution;
  double p = 2.0;
  std::string norm = "l2";
};

struct GridFile {
  Grid grid;
  std::optional<GridMeta> meta;
};

// Coordinates are written with 17 significant digits so a round trip is exact.
void write_grid_csv(std::ostream& out, const Grid& grid, bool header = true);
void write_grid_json(std::ostream& out, const Grid& grid, const std::optional<GridMeta>& meta = {});

// One point per row, d numeric columns, optional non-numeric header row.
Grid read_grid_csv(std::istream& in);
// {dim, n, points, pinned, meta}
GridFile read_grid_json(std::istream& in);

// Dispatches on the extension (.json, anything else is CSV).
GridFile load_grid(const std::string& path);
void save_grid(const std::string& path, const Grid& grid, const std::optional<GridMeta>& meta = {});

std::string format_double(double x);

}  // namespace dualq
