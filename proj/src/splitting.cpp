#include "dualq/splitting.hpp"

#include "dualq/errors.hpp"

namespace dualq {

Index nn_project(const Grid& grid, const Point& xi, const NormSpec& spec) {
  return nearest_index(grid, xi, spec);
}

Index select_vertex(const LocalSolution& sol, double u) {
  double cumulative = 0.0;
  Index last_positive = sol.basis.front();
  for (Index k = 0; k < sol.basis.size(); ++k) {
    const double w = sol.weights(static_cast<Eigen::Index>(k));
    if (w <= 0.0) continue;
    cumulative += w;
    last_positive = sol.basis[k];
    if (u < cumulative) return sol.basis[k];
  }
  return last_positive;
}

SplitOutcome split(LocalSolver& solver, const Point& xi, RngStream& rng) {
  const LocalSolution sol = solver.solve(xi);
  SplitOutcome out;
  out.vertex = select_vertex(sol, rng.uniform());
  out.basis = sol.basis;
  out.weights = sol.weights;
  out.mode = EvalMode::interior;
  return out;
}

SplitOutcome split(const Grid& grid, const Point& xi, const NormSpec& spec, RngStream& rng) {
  LocalSolver solver(grid, spec);
  return split(solver, xi, rng);
}

SplitOutcome split_extended(LocalSolver& solver, const Point& xi, RngStream& rng) {
  // One uniform is drawn either way so the stream position does not depend on the branch.
  const double u = rng.uniform();
  SplitOutcome out;
  if (auto sol = solver.try_solve(xi)) {
    out.vertex = select_vertex(*sol, u);
    out.basis = sol->basis;
    out.weights = sol->weights;
    out.mode = EvalMode::interior;
    return out;
  }
  out.vertex = nn_project(solver.grid(), xi, solver.spec());
  out.weights = Eigen::VectorXd::Ones(1);
  out.mode = EvalMode::exterior;
  return out;
}

SplitOutcome split_extended(const Grid& grid, const Point& xi, const NormSpec& spec,
                            RngStream& rng) {
  LocalSolver solver(grid, spec);
  return split_extended(solver, xi, rng);
}

double interpolate(LocalSolver& solver, const ScalarFunction& f, const Point& xi) {
  const LocalSolution sol = solver.solve(xi);
  double acc = 0.0;
  for (Index k = 0; k < sol.basis.size(); ++k) {
    acc += sol.weights(static_cast<Eigen::Index>(k)) * f(solver.grid()[sol.basis[k]]);
  }
  return acc;
}

double interpolate(const Grid& grid, const ScalarFunction& f, const Point& xi,
                   const NormSpec& spec) {
  LocalSolver solver(grid, spec);
  return interpolate(solver, f, xi);
}

}  // namespace dualq
