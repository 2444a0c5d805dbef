#include "dualq/optimnd.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <memory>
#include <stdexcept>

#include "dualq/errors.hpp"
#include "dualq/local_solver.hpp"
#include "dualq/lp_core.hpp"

namespace dualq {
namespace {

// Gradient of x_i -> ||x_i - xi||^p.
Point cost_gradient(const Point& vertex, const Point& xi, const NormSpec& spec) {
  return norm_p_gradient(vertex - xi, spec);
}

// Current-coordinate solution in the triangle located by a possibly stale triangulation.
std::optional<LocalSolution> solve_located(const Grid& grid, const Point& xi, Locator& locator) {
  const auto t = locator.locate(Eigen::Vector2d(xi(0), xi(1)));
  if (!t) return std::nullopt;
  try {
    LocalSolution sol = dq_solve_in_triangle(grid, locator.triangulation(), *t, xi);
    if (sol.weights.minCoeff() < -1e-10) return std::nullopt;
    sol.weights = sol.weights.cwiseMax(0.0);
    sol.weights /= sol.weights.sum();
    return sol;
  } catch (const DegenerateError&) {
    return std::nullopt;
  }
}

bool can_triangulate(const Grid& grid, const NormSpec& spec) {
  return grid.dim() == 2 && spec.is_quadratic_euclidean() && grid.size() >= 3;
}

std::shared_ptr<const Triangulation> try_triangulate(const Grid& grid) {
  try {
    return std::make_shared<const Triangulation>(triangulate(grid));
  } catch (const std::exception&) {
    return nullptr;
  }
}

void require_smooth(const NormSpec& spec) {
  if (spec.kind != NormKind::l2 || spec.p < 2.0) {
    throw NonSmoothError("gradient requires the Euclidean norm with p >= 2");
  }
}

struct GradientAccumulator {
  Eigen::MatrixXd sum;
  Eigen::MatrixXd sum_sq;
  std::size_t count = 0;
  std::size_t checked = 0;
  std::size_t degenerate = 0;

  GradientAccumulator(Index n, int d)
      : sum(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), d)),
        sum_sq(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), d)) {}

  void merge(const GradientAccumulator& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
    checked += o.checked;
    degenerate += o.degenerate;
  }

  McGradient finish() const {
    McGradient g;
    const auto n = static_cast<double>(count);
    g.n_samples = count;
    g.value = sum / n;
    const Eigen::MatrixXd var =
        ((sum_sq / n - g.value.cwiseProduct(g.value)) * (n / std::max(n - 1.0, 1.0))).cwiseMax(0.0);
    g.std_error = (var / n).cwiseSqrt();
    g.nondegeneracy_checked = checked;
    g.degenerate = degenerate;
    return g;
  }
};

// Adds the per-sample gradient contribution of xi. Returns false outside the
// hull in non-extended mode.
bool add_sample_gradient(LocalSolver& solver, const Point& xi, bool extended, bool check,
                         GradientAccumulator& acc) {
  const Grid& grid = solver.grid();
  const NormSpec& spec = solver.spec();
  const auto sol = solver.try_solve(xi);
  ++acc.count;
  if (!sol) {
    if (!extended) return false;
    const Index nn = nearest_index(grid, xi, spec);
    const Point g = cost_gradient(grid[nn], xi, spec);
    const auto row = static_cast<Eigen::Index>(nn);
    acc.sum.row(row) += g.transpose();
    acc.sum_sq.row(row) += g.cwiseProduct(g).transpose();
    return true;
  }
  for (Index k = 0; k < sol->basis.size(); ++k) {
    const Index i = sol->basis[k];
    const double lambda = sol->weights(static_cast<Eigen::Index>(k));
    const Point g = lambda * (cost_gradient(grid[i], xi, spec) - sol->u1);
    const auto row = static_cast<Eigen::Index>(i);
    acc.sum.row(row) += g.transpose();
    acc.sum_sq.row(row) += g.cwiseProduct(g).transpose();
  }
  if (check) {
    ++acc.checked;
    const Eigen::VectorXd slack = dual_slacks(grid, xi, spec, *sol);
    const double tol = lp_tolerance(grid, xi, sol->value, LpOptions{});
    for (Index j = 0; j < grid.size(); ++j) {
      if (std::binary_search(sol->basis.begin(), sol->basis.end(), j)) continue;
      if (slack(static_cast<Eigen::Index>(j)) <= tol) {
        ++acc.degenerate;
        break;
      }
    }
  }
  return true;
}

void warn_degenerate(const GradientAccumulator& acc) {
  if (acc.checked > 0 && acc.degenerate * 100 > acc.checked) {
    std::cerr << "warning: grid is degenerate for " << acc.degenerate << " of " << acc.checked
              << " checked samples; the gradient formula may not apply\n";
  }
}

}  // namespace

void StepSchedule::validate() const {
  if (!(a > 0.0) || !(b >= 1.0)) throw std::invalid_argument("step schedule needs a > 0 and b >= 1");
}

std::vector<Point> box_corners(const Box& box) {
  const Eigen::Index d = box.lo.size();
  std::vector<Point> out;
  for (Index mask = 0; mask < (Index{1} << d); ++mask) {
    Point c(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      c(j) = ((mask >> (d - 1 - j)) & 1) ? box.hi(j) : box.lo(j);
    }
    out.push_back(std::move(c));
  }
  return out;
}

StepPath cvlq_step(Grid& grid, const Point& xi, double alpha, const NormSpec& spec,
                   Locator* locator) {
  std::optional<LocalSolution> sol;
  StepPath path = StepPath::lp;
  if (locator != nullptr && spec.is_quadratic_euclidean() && grid.dim() == 2) {
    sol = solve_located(grid, xi, *locator);
    if (sol) path = StepPath::delaunay;
  }
  if (!sol) sol = try_local_dq_solve(grid, xi, spec);
  if (!sol) {
    const Index nn = nearest_index(grid, xi, spec);
    if (!grid.is_pinned(nn)) {
      grid.set_point(nn, grid[nn] - 0.5 * alpha * cost_gradient(grid[nn], xi, spec));
    }
    return StepPath::exterior;
  }
  if (alpha == 0.0) return path;
  // All updates use the pre-step coordinates.
  std::vector<Point> moved;
  moved.reserve(sol->basis.size());
  for (Index k = 0; k < sol->basis.size(); ++k) {
    const Index i = sol->basis[k];
    const double lambda = sol->weights(static_cast<Eigen::Index>(k));
    moved.push_back(grid[i] - 0.5 * alpha * lambda * (cost_gradient(grid[i], xi, spec) - sol->u1));
  }
  for (Index k = 0; k < sol->basis.size(); ++k) {
    const Index i = sol->basis[k];
    if (!grid.is_pinned(i) && sol->weights(static_cast<Eigen::Index>(k)) > 0.0) grid.set_point(i, moved[k]);
  }
  return path;
}

TrainReport train(const Distribution& dist, Index n, const TrainConfig& config) {
  config.schedule.validate();
  const int d = dist.dim;
  if (n < static_cast<Index>(d + 1)) throw std::invalid_argument("train needs n >= d + 1");
  if (config.anchors.size() > n) throw std::invalid_argument("more anchors than grid points");

  const RngStream root(config.seed);
  RngStream init_stream = root.substream(0);
  RngStream sample_stream = root.substream(1);

  std::vector<Point> pts = config.anchors;
  std::vector<Index> pinned;
  for (Index i = 0; i < config.anchors.size(); ++i) pinned.push_back(i);
  while (pts.size() < n) pts.push_back(dist.sample(init_stream));
  Grid grid(std::move(pts), std::move(pinned));
  if (numerical_rank(grid.extended_matrix()) < d + 1) {
    throw DegenerateError("initial grid is degenerate (affine dimension < d)");
  }

  TrainReport report;
  report.initial_grid = grid;
  auto record = [&](std::size_t step) {
    RngStream eval(config.eval_seed);
    report.error_trace.push_back({step, mc_dq_error(grid, dist, config.spec, config.eval_samples, eval, true)});
  };
  record(0);

  const bool fast = can_triangulate(grid, config.spec);
  std::shared_ptr<const Triangulation> tri;
  std::optional<Locator> locator;
  const std::size_t rebuild = std::max<std::size_t>(config.retriangulate_every, 1);
  std::size_t outside = 0;
  for (std::size_t k = 0; k < config.steps; ++k) {
    if (fast && k % rebuild == 0) {
      tri = try_triangulate(grid);
      locator.reset();
      if (tri) locator.emplace(*tri);
    }
    const Point xi = dist.sample(sample_stream);
    const StepPath path = cvlq_step(grid, xi, config.schedule.at(k), config.spec,
                                    locator ? &*locator : nullptr);
    if (path == StepPath::exterior) ++outside;
    if (fast && path != StepPath::delaunay) ++report.lp_fallbacks;
    if (config.trace_every > 0 && (k + 1) % config.trace_every == 0 && k + 1 < config.steps) record(k + 1);
  }
  report.outside_fraction = config.steps > 0 ? static_cast<double>(outside) / config.steps : 0.0;
  grid.validate();
  if (config.refine) {
    grid = refine(grid, dist, config.spec, *config.refine).grid;
  }
  if (config.steps > 0 || config.refine) record(config.steps);
  report.grid = std::move(grid);
  return report;
}

McGradient mc_gradient(const Grid& grid, const Distribution& dist, const NormSpec& spec,
                       std::size_t n_samples, RngStream& rng, bool extended, unsigned shards) {
  require_smooth(spec);
  if (dist.dim != grid.dim()) throw std::invalid_argument("grid and distribution dimensions differ");
  std::vector<RngStream> streams = shard_streams(rng, shards);
  const LocalSolver prototype(grid, spec);
  GradientAccumulator total(grid.size(), grid.dim());
  for (unsigned s = 0; s < shards; ++s) {
    LocalSolver solver = prototype;
    GradientAccumulator acc(grid.size(), grid.dim());
    const std::size_t count = shard_count(n_samples, shards, s);
    for (std::size_t k = 0; k < count; ++k) {
      const Point xi = dist.sample(streams[s]);
      if (!add_sample_gradient(solver, xi, extended, k % 100 == 0, acc)) {
        throw SampleOutsideHullError("sample outside conv(grid); use the extended gradient");
      }
    }
    total.merge(acc);
  }
  warn_degenerate(total);
  return total.finish();
}

McGradient sample_gradient(const Grid& grid, const std::vector<Point>& samples,
                           const NormSpec& spec, bool extended) {
  require_smooth(spec);
  LocalSolver solver(grid, spec);
  GradientAccumulator acc(grid.size(), grid.dim());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!add_sample_gradient(solver, samples[k], extended, false, acc)) {
      throw SampleOutsideHullError("sample outside conv(grid); use the extended gradient");
    }
  }
  return acc.finish();
}

RefineResult refine(const Grid& grid, const Distribution& dist, const NormSpec& spec,
                    const RefineConfig& config) {
  require_smooth(spec);
  RefineResult result{grid, 0.0, 0.0, 0};
  if (config.descent_iters <= 0 || config.mc_samples == 0) return result;

  RngStream rng(config.seed);
  std::vector<Point> samples;
  samples.reserve(config.mc_samples);
  for (std::size_t k = 0; k < config.mc_samples; ++k) samples.push_back(dist.sample(rng));

  auto objective = [&](const Grid& g) {
    try {
      g.validate();
      LocalSolver solver(g, spec);
      double acc = 0.0;
      for (const auto& x : samples) acc += solver.extended_value(x).value;
      return acc / static_cast<double>(samples.size());
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  Grid current = grid;
  double value = objective(current);
  result.initial_objective = value;
  for (int it = 0; it < config.descent_iters; ++it) {
    // Diagonal scaling: the quadratic cost has curvature 2 E[lambda_i] in x_i.
    LocalSolver solver(current, spec);
    Eigen::MatrixXd gradient = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(current.size()), current.dim());
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(current.size()));
    for (const auto& x : samples) {
      if (auto sol = solver.try_solve(x)) {
        for (Index k = 0; k < sol->basis.size(); ++k) {
          const Index i = sol->basis[k];
          const double lambda = sol->weights(static_cast<Eigen::Index>(k));
          gradient.row(static_cast<Eigen::Index>(i)) += (lambda * (cost_gradient(current[i], x, spec) - sol->u1)).transpose();
          mass(static_cast<Eigen::Index>(i)) += lambda;
        }
      } else {
        const Index nn = nearest_index(current, x, spec);
        gradient.row(static_cast<Eigen::Index>(nn)) += cost_gradient(current[nn], x, spec).transpose();
        mass(static_cast<Eigen::Index>(nn)) += 1.0;
      }
    }
    bool accepted = false;
    for (double t = 1.0; t > 1e-6; t *= 0.5) {
      Grid trial = current;
      for (Index i = 0; i < current.size(); ++i) {
        const double m = mass(static_cast<Eigen::Index>(i));
        if (current.is_pinned(i) || m <= 0.0) continue;
        const Point step = gradient.row(static_cast<Eigen::Index>(i)).transpose() / (2.0 * m);
        trial.set_point(i, current[i] - t * step);
      }
      const double trial_value = objective(trial);
      if (trial_value < value) {
        current = std::move(trial);
        value = trial_value;
        accepted = true;
        ++result.accepted_steps;
        break;
      }
    }
    if (!accepted) break;
  }
  result.grid = std::move(current);
  result.final_objective = value;
  return result;
}

}  // namespace dualq
