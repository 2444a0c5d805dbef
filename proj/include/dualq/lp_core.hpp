#pragma once

#include <optional>
#include <vector>

#include "dualq/geometry.hpp"

namespace dualq {

// Optimal basic solution of the local dual quantization LP
//   min sum_i lambda_i ||xi - x_i||^p  s.t.  sum lambda_i x_i = xi, sum lambda_i = 1, lambda >= 0
// and its dual pair (u1, u2) with value = u1 . xi + u2.
struct LocalSolution {
  std::vector<Index> basis;  // ascending grid indices, |basis| = d+1
  Eigen::VectorXd weights;   // aligned with basis
  Point u1;
  double u2 = 0.0;
  double value = 0.0;
};

enum class EvalMode { interior, exterior };

struct ExtendedValue {
  double value = 0.0;
  EvalMode mode = EvalMode::interior;
};

struct LpOptions {
  // Relative feasibility/optimality tolerance; effective tol = rel_tol * (1 + scale).
  double rel_tol = 1e-9;
  // Maximum number of candidate bases inspected by the tie-break rule.
  Index tie_break_budget = 20000;
};

// Throws InfeasibleError when xi is outside conv(grid), FlatGridError when
// the grid does not span R^d.
LocalSolution local_dq_solve(const Grid& grid, const Point& xi, const NormSpec& spec,
                             const LpOptions& options = {});

// Same as local_dq_solve but returns nullopt instead of throwing InfeasibleError.
std::optional<LocalSolution> try_local_dq_solve(const Grid& grid, const Point& xi,
                                                const NormSpec& spec,
                                                const LpOptions& options = {});

double local_dq_value(const Grid& grid, const Point& xi, const NormSpec& spec,
                      const LpOptions& options = {});

// Local functional inside the hull, nearest-neighbour distance^p outside.
ExtendedValue local_dq_value_extended(const Grid& grid, const Point& xi, const NormSpec& spec,
                                      const LpOptions& options = {});

// Brute force over every (d+1)-subset: the reference the simplex path is checked against.
// Throws BudgetExceededError when C(n, d+1) > max_subsets.
double enumerate_bases_oracle(const Grid& grid, const Point& xi, const NormSpec& spec,
                              double max_subsets = 1e6);

bool optimality_region_contains(const Grid& grid, std::span<const Index> basis, const Point& xi,
                                const NormSpec& spec, const LpOptions& options = {});

// True when every non-basic dual slack c_j - (u1 . x_j + u2) exceeds the tolerance.
bool is_nondegenerate(const Grid& grid, const Point& xi, const NormSpec& spec,
                      const LpOptions& options = {});

// Dual slacks c_j - u1 . x_j - u2 for all grid points; zero on the basis.
Eigen::VectorXd dual_slacks(const Grid& grid, const Point& xi, const NormSpec& spec,
                            const LocalSolution& sol);

// Costs ||xi - x_j||^p.
Eigen::VectorXd cost_vector(const Grid& grid, const Point& xi, const NormSpec& spec);

// Smallest index among the nearest grid points.
Index nearest_index(const Grid& grid, const Point& xi, const NormSpec& spec);

double lp_tolerance(const Grid& grid, const Point& xi, double value, const LpOptions& options);

}  // namespace dualq
