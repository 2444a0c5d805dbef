#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dualq/distributions.hpp"
#include "dualq/error_metrics.hpp"
#include "dualq/geometry.hpp"
#include "dualq/rng.hpp"
#include "dualq/splitting.hpp"

namespace dualq {

// Cubature weights p_i = P(split(X) = x_i).
struct WeightTable {
  Grid grid;
  Eigen::VectorXd weights;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

// Empirical frequencies of split (extended = false) or split_extended outcomes.
// Throws SampleOutsideHullError in non-extended mode for samples outside the hull.
WeightTable weights(const Grid& grid, const Distribution& dist, const NormSpec& spec,
                    std::size_t n_samples, RngStream& rng, bool extended, unsigned shards = 1);

// Hat-function integrals of an ordered 1D grid; tails go to the end points.
WeightTable exact_weights_1d(const Grid& grid, const Distribution& dist);

// sum_i p_i F(x_i)
double expect(const WeightTable& table, const ScalarFunction& f);

struct SecondOrderReport {
  double cubature_error = 0.0;  // E F(split(X)) - E F(X)
  double cubature_std_error = 0.0;
  double bound = 0.0;           // lip * E ||X - split(X)||^2
  double bound_std_error = 0.0;
  double dual_error = 0.0;      // E ||X - split(X)||^2
  double dual_std_error = 0.0;
  std::size_t n_samples = 0;
  bool satisfied = false;
};

// Both sides use the same samples and splits. satisfied when
// |error| <= bound + 4 * sqrt(se_error^2 + se_bound^2).
SecondOrderReport second_order_report(const Grid& grid, const Distribution& dist,
                                      const NormSpec& spec, const ScalarFunction& f,
                                      double f_prime_lipschitz, std::size_t n_samples,
                                      RngStream& rng);

// interpolate(F, xi) >= F(xi) - 1e-12 at every test point. Throws
// InfeasibleError for points outside the hull.
bool convex_dominance_check(const Grid& grid, const ScalarFunction& f,
                            const std::vector<Point>& test_points, const NormSpec& spec);

}  // namespace dualq
