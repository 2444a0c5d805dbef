#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dualq/delaunay2d.hpp"
#include "dualq/distributions.hpp"
#include "dualq/error_metrics.hpp"
#include "dualq/geometry.hpp"
#include "dualq/rng.hpp"

namespace dualq {

// Robbins-Monro family alpha_k = a / (b + k).
struct StepSchedule {
  double a = 1.0;
  double b = 100.0;

  double at(std::size_t k) const { return a / (b + static_cast<double>(k)); }
  void validate() const;
};

struct RefineConfig {
  std::size_t mc_samples = 20000;
  int descent_iters = 10;
  std::uint64_t seed = 0x5eed;
  unsigned shards = 1;
};

struct TrainConfig {
  std::size_t steps = 0;
  StepSchedule schedule;
  std::uint64_t seed = 0;
  // Anchor points placed first in the grid and pinned.
  std::vector<Point> anchors;
  std::size_t retriangulate_every = 64;
  std::optional<RefineConfig> refine;
  // Error trace period in steps; 0 records only the initial and final grid.
  std::size_t trace_every = 0;
  std::size_t eval_samples = 20000;
  std::uint64_t eval_seed = 2024;
  NormSpec spec;
};

struct TracePoint {
  std::size_t step = 0;
  ErrorEstimate error;
};

struct TrainReport {
  Grid grid;
  Grid initial_grid;
  std::vector<TracePoint> error_trace;
  double outside_fraction = 0.0;
  std::size_t lp_fallbacks = 0;
};

enum class StepPath { delaunay, lp, exterior };

// One CVLQ update. The basis vertices of the optimal LocalSolution move by
// -(alpha/2) lambda_i (grad ||x_i - xi||^p - u1), i.e. x_i -= alpha lambda_i (x_i - z)
// in the quadratic Euclidean case with z the circumcenter. Samples outside
// conv(grid) pull their nearest neighbour instead. Pinned points never move.
// With a locator (possibly built from an older triangulation) the located
// triangle is used when it still contains xi under the current coordinates.
StepPath cvlq_step(Grid& grid, const Point& xi, double alpha, const NormSpec& spec,
                   Locator* locator = nullptr);

std::vector<Point> box_corners(const Box& box);

// Reproducible for a fixed (seed, config).
TrainReport train(const Distribution& dist, Index n, const TrainConfig& config);

struct McGradient {
  Eigen::MatrixXd value;      // n x d
  Eigen::MatrixXd std_error;  // n x d
  std::size_t n_samples = 0;
  std::size_t nondegeneracy_checked = 0;
  std::size_t degenerate = 0;
};

// Monte Carlo estimate of the gradient of E F^p(X; grid) (or of the extended
// functional) with respect to the grid points: per sample,
// lambda_i(X) (grad ||x_i - X||^p - u1(X)) on basis vertices. Requires l2 and p >= 2.
McGradient mc_gradient(const Grid& grid, const Distribution& dist, const NormSpec& spec,
                       std::size_t n_samples, RngStream& rng, bool extended = true,
                       unsigned shards = 1);

// Same gradient evaluated on a fixed sample set (common random numbers).
McGradient sample_gradient(const Grid& grid, const std::vector<Point>& samples,
                           const NormSpec& spec, bool extended = true);

struct RefineResult {
  Grid grid;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  int accepted_steps = 0;
};

// Diagonally scaled gradient descent on a fixed-seed MC estimate of the
// extended error, accepting a step only when the estimate decreases.
RefineResult refine(const Grid& grid, const Distribution& dist, const NormSpec& spec,
                    const RefineConfig& config);

}  // namespace dualq
