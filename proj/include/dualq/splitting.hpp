#pragma once

#include <functional>
#include <vector>

#include "dualq/geometry.hpp"
#include "dualq/local_solver.hpp"
#include "dualq/lp_core.hpp"
#include "dualq/rng.hpp"

namespace dualq {

using ScalarFunction = std::function<double(const Point&)>;

struct SplitOutcome {
  Index vertex = 0;
  std::vector<Index> basis;  // empty in exterior mode
  Eigen::VectorXd weights;
  EvalMode mode = EvalMode::interior;
};

// Nearest grid point; ties go to the smallest index.
Index nn_project(const Grid& grid, const Point& xi, const NormSpec& spec);

// Picks basis[i] for the first i with u < lambda_0 + ... + lambda_i
// (weights in ascending grid-index order).
Index select_vertex(const LocalSolution& sol, double u);

// Random vertex of the optimal basis with probability lambda_i. Throws
// InfeasibleError outside the hull.
SplitOutcome split(LocalSolver& solver, const Point& xi, RngStream& rng);
SplitOutcome split(const Grid& grid, const Point& xi, const NormSpec& spec, RngStream& rng);

// As split inside the hull, nearest-neighbour projection outside.
SplitOutcome split_extended(LocalSolver& solver, const Point& xi, RngStream& rng);
SplitOutcome split_extended(const Grid& grid, const Point& xi, const NormSpec& spec, RngStream& rng);

// sum_i lambda_i F(x_i): conditional expectation of F(split(xi)).
double interpolate(LocalSolver& solver, const ScalarFunction& f, const Point& xi);
double interpolate(const Grid& grid, const ScalarFunction& f, const Point& xi, const NormSpec& spec);

}  // namespace dualq
