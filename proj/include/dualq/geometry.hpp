#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dualq {

using Point = Eigen::VectorXd;
using Index = std::size_t;

enum class NormKind { l1, l2, linf };

// Norm and exponent of the cost ||xi - x||^p.
struct NormSpec {
  NormKind kind = NormKind::l2;
  double p = 2.0;

  NormSpec() = default;
  NormSpec(NormKind k, double exponent);

  // Quadratic Euclidean case, the one with a Delaunay fast path.
  bool is_quadratic_euclidean() const { return kind == NormKind::l2 && p == 2.0; }

  static NormSpec euclidean_quadratic() { return {NormKind::l2, 2.0}; }
};

const char* to_string(NormKind kind);
NormKind parse_norm_kind(const std::string& text);

// Ordered collection of distinct points in R^d. Indices are zero-based.
// Pinned indices are held fixed by the optimizers (anchor points).
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<Point> points, std::vector<Index> pinned = {});

  Index size() const { return points_.size(); }
  int dim() const { return dim_; }
  const Point& operator[](Index i) const { return points_[i]; }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<Index>& pinned() const { return pinned_; }
  bool is_pinned(Index i) const;

  // Moves one point. Only finiteness and dimension are checked; use
  // validate() to re-check distinctness after a batch of moves.
  void set_point(Index i, const Point& p);
  void set_pinned(std::vector<Index> pinned);
  void validate() const;

  // Largest absolute coordinate over all points.
  double max_abs_coord() const;

  // (d+1) x n matrix with coordinates in rows 0..d-1 and a row of ones last.
  Eigen::MatrixXd extended_matrix() const;

 private:
  std::vector<Point> points_;
  std::vector<Index> pinned_;
  int dim_ = 0;
};

// d+1 grid indices (sorted ascending) whose extended matrix is invertible,
// together with its cached LU factorization.
class AffineBasis {
 public:
  AffineBasis(const Grid& grid, std::vector<Index> indices);

  const std::vector<Index>& indices() const { return indices_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Eigen::PartialPivLU<Eigen::MatrixXd>& lu() const { return lu_; }

 private:
  std::vector<Index> indices_;
  Eigen::MatrixXd matrix_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

// Extended matrix [x_i; 1] for the given indices, ones row last.
Eigen::MatrixXd extended_matrix(const Grid& grid, std::span<const Index> indices);

// Rank of a matrix by full-pivot LU with the pivot threshold
// 1e-10 * (1 + max |entry|).
int numerical_rank(const Eigen::MatrixXd& m);

bool is_affine_basis(const Grid& grid, std::span<const Index> indices);

// Weights lambda with sum 1 and sum lambda_i x_i = xi. May be negative.
Eigen::VectorXd barycentric_solve(const AffineBasis& basis, const Grid& grid, const Point& xi);

// Closed hull membership via a phase-one feasibility LP.
bool in_convex_hull(const Grid& grid, const Point& xi);

struct Sphere {
  Point center;
  double radius = 0.0;
};

// Center equidistant (Euclidean) to d+1 affinely independent vertices.
// Throws DegenerateError for (nearly) affinely dependent input.
Sphere circumcenter(std::span<const Point> vertices);

double norm_value(const Point& x, const NormSpec& spec);
// ||x||^p
double norm_p_value(const Point& x, const NormSpec& spec);
// Gradient of x -> ||x||^p. Throws NonSmoothError at kinks.
Point norm_p_gradient(const Point& x, const NormSpec& spec);

double diameter(const Grid& grid, const NormSpec& spec);

}  // namespace dualq
