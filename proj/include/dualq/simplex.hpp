#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dualq/geometry.hpp"

namespace dualq::simplex {

// Result of min c^T x subject to A x = b, x >= 0.
struct Result {
  bool feasible = false;
  // Basic column per row; may include artificial columns (index >= A.cols())
  // left at level zero on redundant rows.
  std::vector<Index> basis;
  Eigen::VectorXd x;     // full primal vector of length A.cols()
  Eigen::VectorXd dual;  // y with A^T y <= c at optimality
  double value = 0.0;
  int iterations = 0;
};

// Phase one only: finds a feasible basis or reports infeasibility.
// The measure of infeasibility (sum of artificials) is compared against tol.
Result find_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol);

// Two-phase dense revised simplex with Bland's rule.
Result solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
             double tol);

}  // namespace dualq::simplex
