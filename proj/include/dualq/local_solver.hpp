#pragma once

#include <memory>
#include <optional>

#include "dualq/delaunay2d.hpp"
#include "dualq/geometry.hpp"
#include "dualq/lp_core.hpp"

namespace dualq {

// Evaluates the local functional for one grid, dispatching to the Delaunay
// fast path when d = 2 with the quadratic Euclidean cost and to the LP
// otherwise. Copies share the triangulation but own their location cursor,
// so concurrent callers should each hold a copy.
class LocalSolver {
 public:
  LocalSolver(Grid grid, NormSpec spec, LpOptions options = {});

  const Grid& grid() const { return *grid_; }
  const NormSpec& spec() const { return spec_; }
  bool uses_delaunay() const { return static_cast<bool>(tri_); }
  const Triangulation* triangulation() const { return tri_.get(); }

  // nullopt when xi lies outside conv(grid).
  std::optional<LocalSolution> try_solve(const Point& xi);
  // Throws InfeasibleError outside the hull.
  LocalSolution solve(const Point& xi);
  ExtendedValue extended_value(const Point& xi);

 private:
  std::shared_ptr<const Grid> grid_;
  NormSpec spec_;
  LpOptions options_;
  std::shared_ptr<const Triangulation> tri_;
  std::optional<Locator> locator_;
};

}  // namespace dualq
