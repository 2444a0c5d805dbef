#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dualq/distributions.hpp"
#include "dualq/geometry.hpp"
#include "dualq/local_solver.hpp"
#include "dualq/rng.hpp"

namespace dualq {

// Monte Carlo estimate; std_error = sample standard deviation / sqrt(n_samples).
struct ErrorEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

// Running mean/variance (Welford), mergeable in a fixed order.
class MeanAccumulator {
 public:
  void add(double x);
  void merge(const MeanAccumulator& other);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased sample variance
  ErrorEstimate estimate() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Draws one u64 from rng and derives `shards` independent substreams from it.
// Shard s processes its share of n_samples with substream s; accumulators are
// merged in shard order, so results depend only on (rng state, n_samples, shards).
std::vector<RngStream> shard_streams(RngStream& rng, unsigned shards);
std::size_t shard_count(std::size_t n_samples, unsigned shards, unsigned shard);

// Unbiased MC estimate of E F^p(X; grid) (extended = false; throws
// SampleOutsideHullError for any sample outside the hull) or of E bar F^p(X; grid).
ErrorEstimate mc_dq_error(const Grid& grid, const Distribution& dist, const NormSpec& spec,
                          std::size_t n_samples, RngStream& rng, bool extended,
                          unsigned shards = 1);

// MC estimate of the Voronoi (nearest-neighbour) error E min_i ||X - x_i||^p.
ErrorEstimate mc_voronoi_error(const Grid& grid, const Distribution& dist, const NormSpec& spec,
                               std::size_t n_samples, RngStream& rng, unsigned shards = 1);

enum class Mode1d { compact, extended };

// Quadratic dual error of an ordered 1D grid from closed-form partial moments:
// sum_i int_{x_i}^{x_{i+1}} (xi - x_i)(x_{i+1} - xi) dP, plus the nearest-neighbour
// tails in extended mode. Compact mode requires supp(P) within [x_1, x_n].
double exact_1d_dq_error(const Grid& grid, const Distribution& dist, Mode1d mode = Mode1d::compact);

// Quadratic Voronoi error with midpoint cell boundaries.
double exact_1d_voronoi_error(const Grid& grid, const Distribution& dist);

struct GridWithError {
  Grid grid;
  double error = 0.0;
};

// Optimal dual grid (i-1)/(n-1) of U([0,1]) with error 2/((p+1)(p+2)) (n-1)^-p.
GridWithError theoretical_1d_uniform(int n, double p);
// Optimal Voronoi grid (2i-1)/(2n) of U([0,1]) with error 1/(2^p (p+1)) n^-p.
GridWithError voronoi_1d_uniform(int n, double p);

// prod_j {lo_j + i (hi_j - lo_j) / m, i = 0..m}; the first axis varies slowest.
Grid product_grid(const Box& box, int m);

// max_i ((x_{i+1} - x_i) / 2)^p over an ordered 1D grid.
double scalar_bound(const Grid& grid, double p);
// sup_{|x|_p = 1} ||x||^p for the built-in norms on R^d.
double norm_constant(NormKind kind, double p, int d);
// d * C * (edge/2)^p * m^-p
double product_bound(int d, double edge, int m, const NormSpec& spec);

// Least-squares slope of log(error^(1/p)) against log(size).
double rate_fit(std::span<const double> sizes, std::span<const double> errors, double p);

void require_ordered_1d(const Grid& grid);

}  // namespace dualq
