#pragma once

#include <array>
#include <optional>
#include <vector>

#include "dualq/geometry.hpp"
#include "dualq/lp_core.hpp"

namespace dualq {

// Planar Delaunay triangulation of a 2D grid. Triangles are counterclockwise
// with the smallest vertex index first and are sorted lexicographically.
// neighbors[t][k] is the triangle across the edge opposite vertex k, or -1
// on the hull boundary.
class Triangulation {
 public:
  static constexpr int kBoundary = -1;

  const std::vector<std::array<Index, 3>>& triangles() const { return triangles_; }
  const std::vector<std::array<int, 3>>& neighbors() const { return neighbors_; }
  const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }
  Index size() const { return triangles_.size(); }

  // Unique undirected edges as (i, j) with i < j.
  std::vector<std::array<Index, 2>> edges() const;

  // Barycentric coordinates of xi in triangle t (vertex order of the triangle).
  Eigen::Vector3d barycentric(Index t, const Eigen::Vector2d& xi) const;

  // Scale used by the geometric predicates.
  double scale() const { return scale_; }

 private:
  friend Triangulation triangulate(const Grid& grid);
  std::vector<std::array<Index, 3>> triangles_;
  std::vector<std::array<int, 3>> neighbors_;
  std::vector<Eigen::Vector2d> vertices_;
  double scale_ = 1.0;
};

// Lawson incremental construction with Delaunay flips. Cocircular
// configurations are resolved towards the diagonal whose sorted index pair
// is lexicographically smallest. Throws DegenerateError for collinear input
// and std::invalid_argument for duplicates or d != 2.
Triangulation triangulate(const Grid& grid);

// Signed incircle determinant (> 0 when d is strictly inside the circle through a, b, c ccw).
double incircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                const Eigen::Vector2d& d);
double orient2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c);

// Walking point location with a per-caller cursor (last triangle hit).
class Locator {
 public:
  explicit Locator(const Triangulation& tri) : tri_(&tri) {}

  // Triangle containing xi (weights >= -tol). On a shared edge or vertex the
  // lowest-indexed containing triangle is returned. nullopt when xi is outside the hull.
  std::optional<Index> locate(const Eigen::Vector2d& xi);

  const Triangulation& triangulation() const { return *tri_; }

 private:
  std::optional<Index> walk(const Eigen::Vector2d& xi, Index start) const;
  bool contains(Index t, const Eigen::Vector2d& xi) const;

  const Triangulation* tri_;
  Index cursor_ = 0;
};

std::optional<Index> locate(const Triangulation& tri, const Point& xi);

// Closed-form LocalSolution in the located triangle: weights are barycentric
// coordinates, u1 = 2 (z - xi) with z the circumcenter. Throws InfeasibleError
// when xi is outside the hull.
LocalSolution dq_solve_delaunay(const Grid& grid, const Triangulation& tri, const Point& xi);
LocalSolution dq_solve_in_triangle(const Grid& grid, const Triangulation& tri, Index t,
                                   const Point& xi);

}  // namespace dualq
