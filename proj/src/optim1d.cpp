#include "dualq/optim1d.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dualq/errors.hpp"

namespace dualq {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const Analytics1d& analytics_of(const Distribution& dist) {
  if (dist.dim != 1 || !dist.analytics) {
    throw std::invalid_argument("distribution '" + dist.name + "' has no 1D analytics");
  }
  return *dist.analytics;
}

std::vector<double> coords(const Grid& grid) {
  std::vector<double> x(grid.size());
  for (Index i = 0; i < grid.size(); ++i) x[i] = grid[i](0);
  return x;
}

Grid make_grid(const std::vector<double>& x, Mode1d mode) {
  std::vector<Point> pts;
  pts.reserve(x.size());
  for (double v : x) pts.push_back(Point::Constant(1, v));
  std::vector<Index> pinned;
  if (mode == Mode1d::compact) pinned = {0, x.size() - 1};
  return Grid(std::move(pts), std::move(pinned));
}

bool strictly_increasing(const std::vector<double>& x) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) return false;
  }
  return true;
}

}  // namespace

Eigen::MatrixXd Tridiagonal::dense() const {
  const Eigen::Index n = diag.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = diag(i);
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = off(i);
  }
  return m;
}

Eigen::VectorXd solve_tridiagonal(const Tridiagonal& m, const Eigen::VectorXd& rhs) {
  const Eigen::Index n = m.diag.size();
  Eigen::VectorXd c(n), d(n);
  double pivot = m.diag(0);
  if (pivot == 0.0) throw DegenerateError("tridiagonal solve: zero pivot");
  c(0) = n > 1 ? m.off(0) / pivot : 0.0;
  d(0) = rhs(0) / pivot;
  for (Eigen::Index i = 1; i < n; ++i) {
    pivot = m.diag(i) - m.off(i - 1) * c(i - 1);
    if (pivot == 0.0) throw DegenerateError("tridiagonal solve: zero pivot");
    c(i) = i + 1 < n ? m.off(i) / pivot : 0.0;
    d(i) = (rhs(i) - m.off(i - 1) * d(i - 1)) / pivot;
  }
  Eigen::VectorXd x(n);
  x(n - 1) = d(n - 1);
  for (Eigen::Index i = n - 2; i >= 0; --i) x(i) = d(i) - c(i) * x(i + 1);
  return x;
}

Eigen::VectorXd gradient_1d(const Grid& grid, const Distribution& dist, Mode1d mode) {
  require_ordered_1d(grid);
  const Analytics1d& an = analytics_of(dist);
  const std::vector<double> x = coords(grid);
  const auto n = static_cast<Eigen::Index>(x.size());
  auto m0 = [&](double a, double b) { return an.partial_moment(0, a, b); };
  auto m1 = [&](double a, double b) { return an.partial_moment(1, a, b); };
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double lo = x[i - 1], mid = x[i], hi = x[i + 1];
    g(i) = m1(lo, hi) - lo * m0(lo, mid) - hi * m0(mid, hi);
  }
  if (mode == Mode1d::extended && n >= 2) {
    const double a = x[0], b = x[1];
    g(0) = 2.0 * (a * m0(-kInf, a) - m1(-kInf, a)) + (m1(a, b) - b * m0(a, b));
    const double y = x[n - 2], z = x[n - 1];
    g(n - 1) = 2.0 * (z * m0(z, kInf) - m1(z, kInf)) + (m1(y, z) - y * m0(y, z));
  }
  return g;
}

Tridiagonal hessian_1d(const Grid& grid, const Distribution& dist, Mode1d mode) {
  require_ordered_1d(grid);
  const Analytics1d& an = analytics_of(dist);
  const std::vector<double> x = coords(grid);
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n < 2) throw std::invalid_argument("hessian_1d needs at least 2 points");
  auto m0 = [&](double a, double b) { return an.partial_moment(0, a, b); };
  Tridiagonal h;
  h.diag.resize(n);
  h.off.resize(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) h.off(i) = -m0(x[i], x[i + 1]);
  for (Eigen::Index i = 1; i + 1 < n; ++i) h.diag(i) = (x[i + 1] - x[i - 1]) * an.pdf(x[i]);
  h.diag(0) = (x[1] - x[0]) * an.pdf(x[0]);
  h.diag(n - 1) = (x[n - 1] - x[n - 2]) * an.pdf(x[n - 1]);
  if (mode == Mode1d::extended) {
    h.diag(0) += 2.0 * m0(-kInf, x[0]);
    h.diag(n - 1) += 2.0 * m0(x[n - 1], kInf);
  }
  return h;
}

NewtonReport newton_solve(const Distribution& dist, int n, Mode1d mode,
                          const NewtonOptions& options) {
  const Analytics1d& an = analytics_of(dist);
  if (n < 2) throw std::invalid_argument("newton_solve needs n >= 2");

  std::vector<double> x;
  if (options.init) {
    x = *options.init;
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("initial grid has the wrong size");
  }
  if (mode == Mode1d::compact) {
    if (!dist.support) throw std::invalid_argument("compact mode requires a bounded support");
    const double a = dist.support->lo(0), b = dist.support->hi(0);
    if (x.empty()) {
      for (int i = 0; i < n; ++i) x.push_back(a + (b - a) * i / (n - 1));
    }
    x.front() = a;
    x.back() = b;
  } else if (x.empty()) {
    const double lo = an.quantile(0.1), hi = an.quantile(0.9);
    for (int i = 0; i < n; ++i) x.push_back(lo + (hi - lo) * i / (n - 1));
  }
  if (!strictly_increasing(x)) throw std::invalid_argument("initial grid must be strictly increasing");

  const Eigen::Index first = mode == Mode1d::compact ? 1 : 0;
  const Eigen::Index last = mode == Mode1d::compact ? n - 2 : n - 1;  // inclusive
  const Eigen::Index free = last - first + 1;

  NewtonReport report{make_grid(x, mode), 0, 0.0, false};
  for (int it = 0;; ++it) {
    const Eigen::VectorXd g = gradient_1d(report.grid, dist, mode);
    const double gnorm = free > 0 ? g.segment(first, free).norm() : 0.0;
    report.iterations = it;
    report.final_gradient_norm = gnorm;
    if (gnorm <= options.tol) {
      report.converged = true;
      return report;
    }
    if (it >= options.max_iter) break;

    const Tridiagonal h = hessian_1d(report.grid, dist, mode);
    Tridiagonal block;
    block.diag = h.diag.segment(first, free);
    block.off = free > 1 ? Eigen::VectorXd(h.off.segment(first, free - 1)) : Eigen::VectorXd();
    const Eigen::VectorXd step = solve_tridiagonal(block, -g.segment(first, free));

    double scale = 1.0;
    std::vector<double> trial;
    for (int halvings = 0; halvings < 60; ++halvings, scale *= 0.5) {
      trial = x;
      for (Eigen::Index k = 0; k < free; ++k) trial[static_cast<std::size_t>(first + k)] += scale * step(k);
      if (strictly_increasing(trial)) break;
    }
    if (!strictly_increasing(trial)) break;
    x = std::move(trial);
    report.grid = make_grid(x, mode);
  }
  std::ostringstream msg;
  msg << "Newton solver did not converge in " << options.max_iter
      << " iterations (gradient norm " << report.final_gradient_norm << ")";
  throw ConvergenceError(msg.str());
}

}  // namespace dualq
