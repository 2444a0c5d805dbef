#include "dualq/grid_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace dualq {
namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_grid_csv(std::ostream& out, const Grid& grid, bool header) {
  if (header) {
    for (int j = 0; j < grid.dim(); ++j) out << (j ? "," : "") << "x" << j;
    out << '\n';
  }
  for (const auto& p : grid.points()) {
    for (Eigen::Index j = 0; j < p.size(); ++j) out << (j ? "," : "") << format_double(p(j));
    out << '\n';
  }
}

void write_grid_json(std::ostream& out, const Grid& grid, const std::optional<GridMeta>& meta) {
  // Numbers are emitted by hand to keep 17 significant digits.
  out << "{\"dim\": " << grid.dim() << ", \"n\": " << grid.size() << ", \"points\": [";
  for (Index i = 0; i < grid.size(); ++i) {
    out << (i ? ", " : "") << '[';
    for (Eigen::Index j = 0; j < grid[i].size(); ++j) out << (j ? ", " : "") << format_double(grid[i](j));
    out << ']';
  }
  out << "], \"pinned\": [";
  for (Index k = 0; k < grid.pinned().size(); ++k) out << (k ? ", " : "") << grid.pinned()[k];
  out << ']';
  if (meta) {
    nlohmann::json m = {{"distribution", meta->distribution}, {"norm", meta->norm}};
    out << ", \"meta\": {\"distribution\": " << m["distribution"].dump() << ", \"p\": "
        << format_double(meta->p) << ", \"norm\": " << m["norm"].dump() << '}';
  }
  out << "}\n";
}

Grid read_grid_csv(std::istream& in) {
  std::vector<Point> pts;
  std::string line;
  bool first = true;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_fields(line);
    std::vector<double> row;
    bool numeric = true;
    for (const auto& f : fields) {
      auto v = parse_number(f);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw std::invalid_argument("non-numeric CSV row: " + line);
    }
    first = false;
    if (cols == 0) cols = row.size();
    if (row.size() != cols) throw std::invalid_argument("ragged CSV row: " + line);
    pts.push_back(Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size())));
  }
  if (pts.empty()) throw std::invalid_argument("empty grid file");
  return Grid(std::move(pts));
}

GridFile read_grid_json(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
    std::vector<Point> pts;
    for (const auto& row : j.at("points")) {
      std::vector<double> v = row.get<std::vector<double>>();
      pts.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    std::vector<Index> pinned;
    if (j.contains("pinned")) pinned = j["pinned"].get<std::vector<Index>>();
    if (j.contains("n") && j["n"].get<std::size_t>() != pts.size()) {
      throw std::invalid_argument("grid JSON: n does not match the number of points");
    }
    if (j.contains("dim") && !pts.empty() && j["dim"].get<Eigen::Index>() != pts.front().size()) {
      throw std::invalid_argument("grid JSON: dim does not match the points");
    }
    GridFile out{Grid(std::move(pts), std::move(pinned)), std::nullopt};
    if (j.contains("meta")) {
      const auto& m = j["meta"];
      out.meta = GridMeta{m.value("distribution", ""), m.value("p", 2.0), m.value("norm", "l2")};
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("invalid grid JSON: ") + e.what());
  }
}

GridFile load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open grid file " + path);
  if (ends_with(path, ".json")) return read_grid_json(in);
  return GridFile{read_grid_csv(in), std::nullopt};
}

void save_grid(const std::string& path, const Grid& grid, const std::optional<GridMeta>& meta) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write grid file " + path);
  if (ends_with(path, ".json")) {
    write_grid_json(out, grid, meta);
  } else {
    write_grid_csv(out, grid);
  }
}

}  // namespace dualq
