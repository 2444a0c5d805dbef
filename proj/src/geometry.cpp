#include "dualq/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dualq/errors.hpp"
#include "dualq/simplex.hpp"

namespace dualq {

NormSpec::NormSpec(NormKind k, double exponent) : kind(k), p(exponent) {
  if (!(exponent >= 1.0) || !std::isfinite(exponent)) {
    throw std::invalid_argument("norm exponent p must be a finite value >= 1");
  }
}

const char* to_string(NormKind kind) {
  switch (kind) {
    case NormKind::l1: return "l1";
    case NormKind::l2: return "l2";
    case NormKind::linf: return "linf";
  }
  return "?";
}

NormKind parse_norm_kind(const std::string& text) {
  if (text == "l1") return NormKind::l1;
  if (text == "l2") return NormKind::l2;
  if (text == "linf") return NormKind::linf;
  throw std::invalid_argument("unknown norm '" + text + "' (expected l1, l2 or linf)");
}

Grid::Grid(std::vector<Point> points, std::vector<Index> pinned) : points_(std::move(points)) {
  dim_ = points_.empty() ? 0 : static_cast<int>(points_.front().size());
  set_pinned(std::move(pinned));
  validate();
}

bool Grid::is_pinned(Index i) const {
  return std::binary_search(pinned_.begin(), pinned_.end(), i);
}

void Grid::set_point(Index i, const Point& p) {
  if (i >= points_.size()) throw std::out_of_range("grid index out of range");
  if (p.size() != dim_) throw std::invalid_argument("point dimension mismatch");
  if (!p.allFinite()) throw std::invalid_argument("grid point has non-finite coordinates");
  points_[i] = p;
}

void Grid::set_pinned(std::vector<Index> pinned) {
  std::sort(pinned.begin(), pinned.end());
  pinned.erase(std::unique(pinned.begin(), pinned.end()), pinned.end());
  if (!pinned.empty() && pinned.back() >= points_.size()) {
    throw std::out_of_range("pinned index out of range");
  }
  pinned_ = std::move(pinned);
}

void Grid::validate() const {
  if (points_.empty()) return;
  if (dim_ < 1) throw std::invalid_argument("grid dimension must be >= 1");
  for (const auto& p : points_) {
    if (p.size() != dim_) throw std::invalid_argument("grid points differ in dimension");
    if (!p.allFinite()) throw std::invalid_argument("grid point has non-finite coordinates");
  }
  std::vector<Index> order(points_.size());
  for (Index i = 0; i < order.size(); ++i) order[i] = i;
  auto less = [&](Index a, Index b) {
    return std::lexicographical_compare(points_[a].begin(), points_[a].end(),
                                        points_[b].begin(), points_[b].end());
  };
  std::sort(order.begin(), order.end(), less);
  for (Index k = 1; k < order.size(); ++k) {
    if (points_[order[k - 1]] == points_[order[k]]) {
      throw std::invalid_argument("grid contains duplicate points (indices " +
                                  std::to_string(std::min(order[k - 1], order[k])) + " and " +
                                  std::to_string(std::max(order[k - 1], order[k])) + ")");
    }
  }
}

double Grid::max_abs_coord() const {
  double m = 0.0;
  for (const auto& p : points_) m = std::max(m, p.cwiseAbs().maxCoeff());
  return m;
}

Eigen::MatrixXd Grid::extended_matrix() const {
  Eigen::MatrixXd a(dim_ + 1, static_cast<Eigen::Index>(points_.size()));
  for (Index j = 0; j < points_.size(); ++j) {
    a.col(static_cast<Eigen::Index>(j)).head(dim_) = points_[j];
    a(dim_, static_cast<Eigen::Index>(j)) = 1.0;
  }
  return a;
}

Eigen::MatrixXd extended_matrix(const Grid& grid, std::span<const Index> indices) {
  const int d = grid.dim();
  Eigen::MatrixXd a(d + 1, static_cast<Eigen::Index>(indices.size()));
  for (Index k = 0; k < indices.size(); ++k) {
    if (indices[k] >= grid.size()) throw std::out_of_range("basis index out of range");
    a.col(static_cast<Eigen::Index>(k)).head(d) = grid[indices[k]];
    a(d, static_cast<Eigen::Index>(k)) = 1.0;
  }
  return a;
}

int numerical_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  const double threshold = 1e-10 * (1.0 + m.cwiseAbs().maxCoeff());
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  const auto& lu_mat = lu.matrixLU();
  const Eigen::Index k = std::min(m.rows(), m.cols());
  int rank = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (std::abs(lu_mat(i, i)) > threshold) ++rank;
  }
  return rank;
}

bool is_affine_basis(const Grid& grid, std::span<const Index> indices) {
  const auto a = extended_matrix(grid, indices);
  if (indices.size() != static_cast<Index>(grid.dim() + 1)) return false;
  return numerical_rank(a) == grid.dim() + 1;
}

AffineBasis::AffineBasis(const Grid& grid, std::vector<Index> indices)
    : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (indices_.size() != static_cast<Index>(grid.dim() + 1)) {
    throw std::invalid_argument("affine basis needs exactly d+1 indices");
  }
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw std::invalid_argument("affine basis indices must be distinct");
  }
  matrix_ = extended_matrix(grid, indices_);
  if (numerical_rank(matrix_) != grid.dim() + 1) {
    throw DegenerateError("indices do not form an affine basis");
  }
  lu_.compute(matrix_);
}

Eigen::VectorXd barycentric_solve(const AffineBasis& basis, const Grid& grid, const Point& xi) {
  if (xi.size() != grid.dim()) throw std::invalid_argument("query dimension mismatch");
  Eigen::VectorXd b(grid.dim() + 1);
  b.head(grid.dim()) = xi;
  b(grid.dim()) = 1.0;
  Eigen::VectorXd lambda = basis.lu().solve(b);
  if (!lambda.allFinite()) throw DegenerateError("singular basis factorization");
  return lambda;
}

bool in_convex_hull(const Grid& grid, const Point& xi) {
  if (xi.size() != grid.dim()) throw std::invalid_argument("query dimension mismatch");
  if (grid.size() == 0) return false;
  Eigen::VectorXd b(grid.dim() + 1);
  b.head(grid.dim()) = xi;
  b(grid.dim()) = 1.0;
  const double scale = std::max(grid.max_abs_coord(), xi.cwiseAbs().maxCoeff());
  return simplex::find_feasible(grid.extended_matrix(), b, 1e-9 * (1.0 + scale)).feasible;
}

Sphere circumcenter(std::span<const Point> vertices) {
  if (vertices.empty()) throw std::invalid_argument("circumcenter of empty vertex set");
  const Eigen::Index d = vertices.front().size();
  if (static_cast<Eigen::Index>(vertices.size()) != d + 1) {
    throw std::invalid_argument("circumcenter needs exactly d+1 vertices");
  }
  // 2 (v_k - v_0) . z = |v_k|^2 - |v_0|^2
  Eigen::MatrixXd m(d, d);
  Eigen::VectorXd rhs(d);
  const Point& v0 = vertices[0];
  double magnitude = v0.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 1; k <= d; ++k) {
    const Point& v = vertices[static_cast<Index>(k)];
    if (v.size() != d) throw std::invalid_argument("vertex dimension mismatch");
    m.row(k - 1) = 2.0 * (v - v0).transpose();
    rhs(k - 1) = v.squaredNorm() - v0.squaredNorm();
    magnitude = std::max(magnitude, v.cwiseAbs().maxCoeff());
  }
  Eigen::MatrixXd ext(d + 1, d + 1);
  for (Eigen::Index k = 0; k <= d; ++k) {
    ext.col(k).head(d) = vertices[static_cast<Index>(k)];
    ext(d, k) = 1.0;
  }
  if (numerical_rank(ext) != d + 1) throw DegenerateError("circumcenter of degenerate simplex");
  Sphere s;
  s.center = m.fullPivLu().solve(rhs);
  s.radius = (s.center - v0).norm();
  if (!s.center.allFinite()) throw DegenerateError("circumcenter of degenerate simplex");
  return s;
}

double norm_value(const Point& x, const NormSpec& spec) {
  switch (spec.kind) {
    case NormKind::l1: return x.lpNorm<1>();
    case NormKind::l2: return x.norm();
    case NormKind::linf: return x.size() == 0 ? 0.0 : x.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

double norm_p_value(const Point& x, const NormSpec& spec) {
  if (spec.kind == NormKind::l2 && spec.p == 2.0) return x.squaredNorm();
  const double v = norm_value(x, spec);
  return spec.p == 1.0 ? v : std::pow(v, spec.p);
}

Point norm_p_gradient(const Point& x, const NormSpec& spec) {
  const double r = norm_value(x, spec);
  if (r == 0.0) {
    if (spec.p > 1.0) return Point::Zero(x.size());
    throw NonSmoothError("norm^1 is not differentiable at the origin");
  }
  const double outer = spec.p * std::pow(r, spec.p - 1.0);
  switch (spec.kind) {
    case NormKind::l2:
      return outer * x / r;
    case NormKind::l1: {
      Point g(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x(i) == 0.0) throw NonSmoothError("l1 norm has a kink at a zero coordinate");
        g(i) = outer * (x(i) > 0.0 ? 1.0 : -1.0);
      }
      return g;
    }
    case NormKind::linf: {
      Point g = Point::Zero(x.size());
      Eigen::Index arg = -1;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::abs(x(i)) == r) {
          if (arg >= 0) throw NonSmoothError("linf norm has a kink where the maximum is not unique");
          arg = i;
        }
      }
      g(arg) = outer * (x(arg) > 0.0 ? 1.0 : -1.0);
      return g;
    }
  }
  return Point::Zero(x.size());
}

double diameter(const Grid& grid, const NormSpec& spec) {
  double best = 0.0;
  for (Index i = 0; i < grid.size(); ++i) {
    for (Index j = i + 1; j < grid.size(); ++j) {
      best = std::max(best, norm_value(grid[i] - grid[j], spec));
    }
  }
  return best;
}

}  // namespace dualq
