#pragma once

#include <optional>
#include <vector>

#include "dualq/distributions.hpp"
#include "dualq/error_metrics.hpp"
#include "dualq/geometry.hpp"

namespace dualq {

// Symmetric tridiagonal matrix: diag(i) = H(i,i), off(i) = H(i,i+1) = H(i+1,i).
struct Tridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd off;

  Eigen::MatrixXd dense() const;
};

// Thomas elimination. Throws DegenerateError on a zero pivot.
Eigen::VectorXd solve_tridiagonal(const Tridiagonal& m, const Eigen::VectorXd& rhs);

// Gradient of the quadratic dual error of an ordered 1D grid with respect to
// the grid points. In compact mode the endpoint components are zero (pinned).
Eigen::VectorXd gradient_1d(const Grid& grid, const Distribution& dist, Mode1d mode);

// Hessian of the same objective. Endpoint rows in compact mode describe the
// unconstrained objective; the Newton solver only uses the interior block.
Tridiagonal hessian_1d(const Grid& grid, const Distribution& dist, Mode1d mode);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 100;
  std::optional<std::vector<double>> init;
};

struct NewtonReport {
  Grid grid;
  int iterations = 0;
  double final_gradient_norm = 0.0;
  bool converged = false;
};

// Damped Newton: a step that breaks x_1 < ... < x_n is halved until the order
// is restored. Compact mode pins x_1, x_n to the support endpoints. Throws
// ConvergenceError after max_iter iterations.
NewtonReport newton_solve(const Distribution& dist, int n, Mode1d mode,
                          const NewtonOptions& options = {});

}  // namespace dualq
