#pragma once

#include <initializer_list>
#include <vector>

#include "dualq/geometry.hpp"
#include "dualq/rng.hpp"

namespace testutil {

inline dualq::Point pt(std::initializer_list<double> c) {
  dualq::Point p(static_cast<Eigen::Index>(c.size()));
  Eigen::Index i = 0;
  for (double v : c) p(i++) = v;
  return p;
}

inline dualq::Grid grid(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<dualq::Point> pts;
  for (const auto& r : rows) pts.push_back(pt(r));
  return dualq::Grid(std::move(pts));
}

inline dualq::Grid grid1d(std::initializer_list<double> xs) {
  std::vector<dualq::Point> pts;
  for (double x : xs) pts.push_back(pt({x}));
  return dualq::Grid(std::move(pts));
}

inline dualq::Grid random_grid(dualq::RngStream& rng, int n, int d) {
  std::vector<dualq::Point> pts;
  for (int i = 0; i < n; ++i) {
    dualq::Point p(d);
    for (int j = 0; j < d; ++j) p(j) = rng.uniform();
    pts.push_back(p);
  }
  return dualq::Grid(std::move(pts));
}

// Random convex combination of the grid points (always inside the hull).
inline dualq::Point random_convex(dualq::RngStream& rng, const dualq::Grid& g) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(g.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = -std::log(rng.uniform_open_left());
  w /= w.sum();
  dualq::Point x = dualq::Point::Zero(g.dim());
  for (dualq::Index i = 0; i < g.size(); ++i) x += w(static_cast<Eigen::Index>(i)) * g[i];
  return x;
}

}  // namespace testutil
