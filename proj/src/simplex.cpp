#include "dualq/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dualq/errors.hpp"

namespace dualq::simplex {
namespace {

constexpr double kPivotTol = 1e-11;

struct Tableau {
  Eigen::MatrixXd a;  // rows flipped so that b >= 0, artificial identity appended
  Eigen::VectorXd b;
  Index n_original = 0;
};

Tableau make_tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const Index m = static_cast<Index>(a.rows());
  const Index n = static_cast<Index>(a.cols());
  Tableau t;
  t.n_original = n;
  t.a = Eigen::MatrixXd::Zero(m, n + m);
  t.b = b;
  for (Index i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    t.a.row(i).head(n) = sign * a.row(i);
    t.b(i) = sign * b(i);
    t.a(i, n + i) = 1.0;
  }
  return t;
}

// Runs Bland-rule iterations from the given basis. Columns >= allowed_cols
// never enter. Returns the iteration count.
int iterate(const Tableau& t, const Eigen::VectorXd& cost, Index allowed_cols,
            std::vector<Index>& basis, double tol) {
  const Index m = basis.size();
  const int max_iter = static_cast<int>(50 * (t.a.cols() + m) + 100);
  std::vector<char> in_basis(t.a.cols(), 0);
  for (Index j : basis) in_basis[j] = 1;

  Eigen::MatrixXd bmat(m, m);
  Eigen::VectorXd cb(m);
  for (int it = 0; it < max_iter; ++it) {
    for (Index i = 0; i < m; ++i) {
      bmat.col(i) = t.a.col(basis[i]);
      cb(i) = cost(basis[i]);
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
    const Eigen::VectorXd xb = lu.solve(t.b);
    const Eigen::VectorXd y = lu.transpose().solve(cb);

    Index entering = allowed_cols;
    for (Index j = 0; j < allowed_cols; ++j) {
      if (in_basis[j]) continue;
      const double reduced = cost(j) - t.a.col(j).dot(y);
      if (reduced < -tol) {
        entering = j;
        break;
      }
    }
    if (entering == allowed_cols) return it;

    const Eigen::VectorXd dir = lu.solve(t.a.col(entering));
    Index leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m; ++i) {
      if (dir(i) <= kPivotTol) continue;
      const double theta = std::max(xb(i), 0.0) / dir(i);
      if (leave == m) {
        best = theta;
        leave = i;
        continue;
      }
      const bool tie = std::abs(theta - best) <= 1e-12 * (1.0 + std::abs(best));
      if (theta < best && !tie) {
        best = theta;
        leave = i;
      } else if (tie && basis[i] < basis[leave]) {
        leave = i;
      }
    }
    if (leave == m) throw Error("simplex: unbounded direction in a bounded problem");
    in_basis[basis[leave]] = 0;
    basis[leave] = entering;
    in_basis[entering] = 1;
  }
  throw ConvergenceError("simplex: iteration limit reached");
}

Result finish(const Tableau& t, const Eigen::VectorXd& cost, std::vector<Index> basis) {
  const Index m = basis.size();
  Eigen::MatrixXd bmat(m, m);
  Eigen::VectorXd cb(m);
  for (Index i = 0; i < m; ++i) {
    bmat.col(i) = t.a.col(basis[i]);
    cb(i) = cost(basis[i]);
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
  const Eigen::VectorXd xb = lu.solve(t.b);
  Result r;
  r.feasible = true;
  r.x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(t.n_original));
  for (Index i = 0; i < m; ++i) {
    if (basis[i] < t.n_original) r.x(basis[i]) = std::max(xb(i), 0.0);
  }
  r.dual = lu.transpose().solve(cb);
  r.value = cb.dot(xb);
  r.basis = std::move(basis);
  return r;
}

struct PhaseOne {
  Tableau tableau;
  std::vector<Index> basis;
  bool feasible = false;
  int iterations = 0;
};

PhaseOne phase_one(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol) {
  PhaseOne p{make_tableau(a, b), {}, false, 0};
  const Index m = static_cast<Index>(a.rows());
  const Index n = static_cast<Index>(a.cols());
  p.basis.resize(m);
  for (Index i = 0; i < m; ++i) p.basis[i] = n + i;
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + m));
  cost.tail(static_cast<Eigen::Index>(m)).setOnes();
  p.iterations = iterate(p.tableau, cost, n, p.basis, tol);
  const Result r = finish(p.tableau, cost, p.basis);
  p.feasible = r.value <= tol;
  if (!p.feasible) return p;

  // Pivot zero-level artificials out wherever an original column can replace them.
  for (Index i = 0; i < m; ++i) {
    if (p.basis[i] < n) continue;
    Eigen::MatrixXd bmat(m, m);
    for (Index k = 0; k < m; ++k) bmat.col(k) = p.tableau.a.col(p.basis[k]);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
    for (Index j = 0; j < n; ++j) {
      if (std::find(p.basis.begin(), p.basis.end(), j) != p.basis.end()) continue;
      const Eigen::VectorXd dir = lu.solve(p.tableau.a.col(j));
      if (std::abs(dir(i)) > 1e-9) {
        p.basis[i] = j;
        break;
      }
    }
  }
  return p;
}

}  // namespace

Result find_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol) {
  PhaseOne p = phase_one(a, b, tol);
  if (!p.feasible) return Result{};
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(p.tableau.a.cols());
  Result r = finish(p.tableau, zero, p.basis);
  r.iterations = p.iterations;
  return r;
}

Result solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
             double tol) {
  PhaseOne p = phase_one(a, b, tol);
  if (!p.feasible) return Result{};
  const Index n = static_cast<Index>(a.cols());
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(p.tableau.a.cols());
  cost.head(static_cast<Eigen::Index>(n)) = c;
  const int it = iterate(p.tableau, cost, n, p.basis, tol);
  Result r = finish(p.tableau, cost, p.basis);
  r.iterations = p.iterations + it;
  // Undo the row flips so the dual refers to the caller's rows.
  for (Index i = 0; i < static_cast<Index>(b.size()); ++i) {
    if (b(i) < 0.0) r.dual(i) = -r.dual(i);
  }
  return r;
}

}  // namespace dualq::simplex
