#include "dualq/cubature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dualq/errors.hpp"
#include "dualq/local_solver.hpp"

namespace dualq {

WeightTable weights(const Grid& grid, const Distribution& dist, const NormSpec& spec,
                    std::size_t n_samples, RngStream& rng, bool extended, unsigned shards) {
  if (n_samples == 0) throw std::invalid_argument("weights needs n_samples > 0");
  WeightTable table{grid, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size())), n_samples,
                    rng.seed()};
  std::vector<RngStream> streams = shard_streams(rng, shards);
  const LocalSolver prototype(grid, spec);
  for (unsigned s = 0; s < shards; ++s) {
    LocalSolver solver = prototype;
    const std::size_t count = shard_count(n_samples, shards, s);
    for (std::size_t k = 0; k < count; ++k) {
      const Point xi = dist.sample(streams[s]);
      SplitOutcome out;
      if (extended) {
        out = split_extended(solver, xi, streams[s]);
      } else {
        try {
          out = split(solver, xi, streams[s]);
        } catch (const InfeasibleError&) {
          throw SampleOutsideHullError("sample outside conv(grid); use extended weights");
        }
      }
      table.weights(static_cast<Eigen::Index>(out.vertex)) += 1.0;
    }
  }
  table.weights /= static_cast<double>(n_samples);
  return table;
}

WeightTable exact_weights_1d(const Grid& grid, const Distribution& dist) {
  require_ordered_1d(grid);
  if (!dist.analytics) throw std::invalid_argument("exact weights need closed-form analytics");
  const auto& an = *dist.analytics;
  const Index n = grid.size();
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (Index i = 0; i + 1 < n; ++i) {
    const double a = grid[i](0);
    const double b = grid[i + 1](0);
    const double m0 = an.partial_moment(0, a, b);
    const double m1 = an.partial_moment(1, a, b);
    // int (b - x)/(b - a) dP and int (x - a)/(b - a) dP
    w(static_cast<Eigen::Index>(i)) += (b * m0 - m1) / (b - a);
    w(static_cast<Eigen::Index>(i + 1)) += (m1 - a * m0) / (b - a);
  }
  w(0) += an.partial_moment(0, -inf, grid[0](0));
  w(static_cast<Eigen::Index>(n - 1)) += an.partial_moment(0, grid[n - 1](0), inf);
  return WeightTable{grid, w, 0, 0};
}

double expect(const WeightTable& table, const ScalarFunction& f) {
  double acc = 0.0;
  for (Index i = 0; i < table.grid.size(); ++i) {
    acc += table.weights(static_cast<Eigen::Index>(i)) * f(table.grid[i]);
  }
  return acc;
}

SecondOrderReport second_order_report(const Grid& grid, const Distribution& dist,
                                      const NormSpec& spec, const ScalarFunction& f,
                                      double f_prime_lipschitz, std::size_t n_samples,
                                      RngStream& rng) {
  if (spec.kind != NormKind::l2) throw std::invalid_argument("second-order report needs the l2 norm");
  LocalSolver solver(grid, spec);
  MeanAccumulator err;
  MeanAccumulator dist2;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const Point xi = dist.sample(rng);
    const SplitOutcome out = split_extended(solver, xi, rng);
    const Point& v = grid[out.vertex];
    err.add(f(v) - f(xi));
    dist2.add((v - xi).squaredNorm());
  }
  SecondOrderReport r;
  r.n_samples = n_samples;
  r.cubature_error = err.mean();
  r.cubature_std_error = err.estimate().std_error;
  r.dual_error = dist2.mean();
  r.dual_std_error = dist2.estimate().std_error;
  r.bound = f_prime_lipschitz * r.dual_error;
  r.bound_std_error = f_prime_lipschitz * r.dual_std_error;
  const double sigma = std::hypot(r.cubature_std_error, r.bound_std_error);
  r.satisfied = std::abs(r.cubature_error) <= r.bound + 4.0 * sigma;
  return r;
}

bool convex_dominance_check(const Grid& grid, const ScalarFunction& f,
                            const std::vector<Point>& test_points, const NormSpec& spec) {
  LocalSolver solver(grid, spec);
  bool ok = true;
  for (const auto& xi : test_points) {
    if (interpolate(solver, f, xi) < f(xi) - 1e-12) ok = false;
  }
  return ok;
}

}  // namespace dualq
