#include "dualq/lp_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dualq/errors.hpp"
#include "dualq/simplex.hpp"

namespace dualq {
namespace {

Eigen::VectorXd rhs_of(const Point& xi) {
  Eigen::VectorXd b(xi.size() + 1);
  b.head(xi.size()) = xi;
  b(xi.size()) = 1.0;
  return b;
}

void check_query(const Grid& grid, const Point& xi) {
  if (grid.size() == 0) throw std::invalid_argument("empty grid");
  if (xi.size() != grid.dim()) throw std::invalid_argument("query dimension mismatch");
  if (!xi.allFinite()) throw std::invalid_argument("query point has non-finite coordinates");
}

// Visits the k-subsets of {0..n-1} in lexicographic order until visit returns true.
template <typename Visit>
bool for_each_subset(Index n, Index k, Index budget, Visit&& visit) {
  if (k > n) return false;
  std::vector<Index> idx(k);
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index count = 0; count < budget; ++count) {
    if (visit(idx)) return true;
    Index i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (Index j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return false;
}

double binomial(Index n, Index k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace

Eigen::VectorXd cost_vector(const Grid& grid, const Point& xi, const NormSpec& spec) {
  Eigen::VectorXd c(static_cast<Eigen::Index>(grid.size()));
  for (Index j = 0; j < grid.size(); ++j) c(static_cast<Eigen::Index>(j)) = norm_p_value(xi - grid[j], spec);
  return c;
}

Index nearest_index(const Grid& grid, const Point& xi, const NormSpec& spec) {
  check_query(grid, xi);
  Index best = 0;
  double best_dist = norm_value(xi - grid[0], spec);
  for (Index j = 1; j < grid.size(); ++j) {
    const double dist = norm_value(xi - grid[j], spec);
    if (dist < best_dist) {
      best_dist = dist;
      best = j;
    }
  }
  return best;
}

double lp_tolerance(const Grid& grid, const Point& xi, double value, const LpOptions& options) {
  const double scale = std::max({grid.max_abs_coord(), xi.cwiseAbs().maxCoeff(), std::abs(value)});
  return options.rel_tol * (1.0 + scale);
}

LocalSolution local_dq_solve(const Grid& grid, const Point& xi, const NormSpec& spec,
                             const LpOptions& options) {
  auto sol = try_local_dq_solve(grid, xi, spec, options);
  if (!sol) throw InfeasibleError("query point lies outside conv(grid)");
  return std::move(*sol);
}

std::optional<LocalSolution> try_local_dq_solve(const Grid& grid, const Point& xi,
                                                const NormSpec& spec, const LpOptions& options) {
  check_query(grid, xi);
  const int d = grid.dim();
  const Index m = static_cast<Index>(d + 1);
  const Eigen::MatrixXd a = grid.extended_matrix();
  if (numerical_rank(a) < d + 1) {
    throw FlatGridError("grid does not span R^d (affine dimension < d)");
  }
  const Eigen::VectorXd b = rhs_of(xi);
  const Eigen::VectorXd c = cost_vector(grid, xi, spec);
  const double tol = lp_tolerance(grid, xi, c.maxCoeff(), options);

  const simplex::Result r = simplex::solve(a, b, c, tol);
  if (!r.feasible) return std::nullopt;

  // Deterministic choice among tied optimal bases: every basis made of columns
  // with zero reduced cost against the terminal dual is optimal; take the
  // lexicographically smallest one with nonnegative weights.
  std::vector<Index> tight;
  for (Index j = 0; j < grid.size(); ++j) {
    const double slack = c(static_cast<Eigen::Index>(j)) - a.col(static_cast<Eigen::Index>(j)).dot(r.dual);
    if (slack <= tol) tight.push_back(j);
  }
  std::vector<Index> chosen;
  Eigen::VectorXd chosen_weights;
  for_each_subset(tight.size(), m, options.tie_break_budget, [&](const std::vector<Index>& sub) {
    std::vector<Index> cand(m);
    for (Index k = 0; k < m; ++k) cand[k] = tight[sub[k]];
    const Eigen::MatrixXd am = extended_matrix(grid, cand);
    if (numerical_rank(am) != d + 1) return false;
    const Eigen::VectorXd lambda = am.partialPivLu().solve(b);
    if (lambda.minCoeff() < -tol) return false;
    chosen = std::move(cand);
    chosen_weights = lambda;
    return true;
  });
  if (chosen.empty()) {
    // Fallback: terminal simplex basis.
    chosen = r.basis;
    std::sort(chosen.begin(), chosen.end());
    chosen_weights.resize(static_cast<Eigen::Index>(m));
    for (Index k = 0; k < m; ++k) chosen_weights(static_cast<Eigen::Index>(k)) = r.x(static_cast<Eigen::Index>(chosen[k]));
  }

  LocalSolution sol;
  sol.basis = std::move(chosen);
  sol.weights = chosen_weights.cwiseMax(0.0);
  sol.weights /= sol.weights.sum();
  // Dual from the chosen basis: A_I^T u = c_I.
  const Eigen::MatrixXd ab = extended_matrix(grid, sol.basis);
  Eigen::VectorXd cb(static_cast<Eigen::Index>(m));
  for (Index k = 0; k < m; ++k) cb(static_cast<Eigen::Index>(k)) = c(static_cast<Eigen::Index>(sol.basis[k]));
  const Eigen::VectorXd u = ab.transpose().partialPivLu().solve(cb);
  sol.u1 = u.head(d);
  sol.u2 = u(d);
  sol.value = sol.weights.dot(cb);
  return sol;
}

double local_dq_value(const Grid& grid, const Point& xi, const NormSpec& spec,
                      const LpOptions& options) {
  return local_dq_solve(grid, xi, spec, options).value;
}

ExtendedValue local_dq_value_extended(const Grid& grid, const Point& xi, const NormSpec& spec,
                                      const LpOptions& options) {
  if (auto sol = try_local_dq_solve(grid, xi, spec, options)) {
    return {sol->value, EvalMode::interior};
  }
  const Index nn = nearest_index(grid, xi, spec);
  return {norm_p_value(xi - grid[nn], spec), EvalMode::exterior};
}

double enumerate_bases_oracle(const Grid& grid, const Point& xi, const NormSpec& spec,
                              double max_subsets) {
  check_query(grid, xi);
  const Index m = static_cast<Index>(grid.dim() + 1);
  if (binomial(grid.size(), m) > max_subsets) {
    throw BudgetExceededError("basis enumeration exceeds the combinatorial budget");
  }
  const Eigen::VectorXd b = rhs_of(xi);
  const Eigen::VectorXd c = cost_vector(grid, xi, spec);
  const double tol = 1e-9 * (1.0 + std::max(grid.max_abs_coord(), xi.cwiseAbs().maxCoeff()));
  double best = std::numeric_limits<double>::infinity();
  for_each_subset(grid.size(), m, static_cast<Index>(max_subsets) + 1, [&](const std::vector<Index>& sub) {
    const Eigen::MatrixXd am = extended_matrix(grid, sub);
    if (numerical_rank(am) != grid.dim() + 1) return false;
    const Eigen::VectorXd lambda = am.fullPivLu().solve(b);
    if (lambda.minCoeff() < -tol) return false;
    double v = 0.0;
    for (Index k = 0; k < m; ++k) v += std::max(lambda(static_cast<Eigen::Index>(k)), 0.0) * c(static_cast<Eigen::Index>(sub[k]));
    best = std::min(best, v);
    return false;
  });
  if (!std::isfinite(best)) throw InfeasibleError("query point lies outside conv(grid)");
  return best;
}

bool optimality_region_contains(const Grid& grid, std::span<const Index> basis, const Point& xi,
                                const NormSpec& spec, const LpOptions& options) {
  const AffineBasis ab(grid, std::vector<Index>(basis.begin(), basis.end()));
  const Eigen::VectorXd lambda = barycentric_solve(ab, grid, xi);
  const double tol = lp_tolerance(grid, xi, 0.0, options);
  if (lambda.minCoeff() < -tol) return false;
  double v = 0.0;
  for (Index k = 0; k < ab.indices().size(); ++k) {
    v += lambda(static_cast<Eigen::Index>(k)) * norm_p_value(xi - grid[ab.indices()[k]], spec);
  }
  const double best = local_dq_value(grid, xi, spec, options);
  return v <= best + lp_tolerance(grid, xi, best, options);
}

Eigen::VectorXd dual_slacks(const Grid& grid, const Point& xi, const NormSpec& spec,
                            const LocalSolution& sol) {
  Eigen::VectorXd s = cost_vector(grid, xi, spec);
  for (Index j = 0; j < grid.size(); ++j) s(static_cast<Eigen::Index>(j)) -= sol.u1.dot(grid[j]) + sol.u2;
  return s;
}

bool is_nondegenerate(const Grid& grid, const Point& xi, const NormSpec& spec,
                      const LpOptions& options) {
  const LocalSolution sol = local_dq_solve(grid, xi, spec, options);
  const Eigen::VectorXd slack = dual_slacks(grid, xi, spec, sol);
  const double tol = lp_tolerance(grid, xi, sol.value, options);
  for (Index j = 0; j < grid.size(); ++j) {
    if (std::binary_search(sol.basis.begin(), sol.basis.end(), j)) continue;
    if (slack(static_cast<Eigen::Index>(j)) <= tol) return false;
  }
  return true;
}

}  // namespace dualq
