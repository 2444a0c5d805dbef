#include "dualq/local_solver.hpp"

#include "dualq/errors.hpp"

namespace dualq {

LocalSolver::LocalSolver(Grid grid, NormSpec spec, LpOptions options)
    : grid_(std::make_shared<const Grid>(std::move(grid))), spec_(spec), options_(options) {
  if (grid_->dim() == 2 && spec_.is_quadratic_euclidean() && grid_->size() >= 3) {
    try {
      tri_ = std::make_shared<const Triangulation>(triangulate(*grid_));
    } catch (const DegenerateError&) {
      // Collinear grid: the LP path reports FlatGridError on first use.
    }
  }
}

std::optional<LocalSolution> LocalSolver::try_solve(const Point& xi) {
  if (!tri_) return try_local_dq_solve(*grid_, xi, spec_, options_);
  if (!locator_) locator_.emplace(*tri_);
  const auto t = locator_->locate(Eigen::Vector2d(xi(0), xi(1)));
  if (!t) return std::nullopt;
  LocalSolution sol = dq_solve_in_triangle(*grid_, *tri_, *t, xi);
  sol.weights = sol.weights.cwiseMax(0.0);
  sol.weights /= sol.weights.sum();
  sol.value = 0.0;
  for (Index k = 0; k < 3; ++k) {
    sol.value += sol.weights(static_cast<Eigen::Index>(k)) * (xi - (*grid_)[sol.basis[k]]).squaredNorm();
  }
  return sol;
}

LocalSolution LocalSolver::solve(const Point& xi) {
  auto sol = try_solve(xi);
  if (!sol) throw InfeasibleError("query point lies outside conv(grid)");
  return std::move(*sol);
}

ExtendedValue LocalSolver::extended_value(const Point& xi) {
  if (auto sol = try_solve(xi)) return {sol->value, EvalMode::interior};
  const Index nn = nearest_index(*grid_, xi, spec_);
  return {norm_p_value(xi - (*grid_)[nn], spec_), EvalMode::exterior};
}

}  // namespace dualq
