#include "dualq/error_metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "dualq/errors.hpp"

namespace dualq {

void MeanAccumulator::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void MeanAccumulator::merge(const MeanAccumulator& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double total = static_cast<double>(n_ + other.n_);
  const double delta = other.mean_ - mean_;
  mean_ += delta * static_cast<double>(other.n_) / total;
  m2_ += other.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(other.n_) / total;
  n_ += other.n_;
}

double MeanAccumulator::variance() const {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

ErrorEstimate MeanAccumulator::estimate() const {
  ErrorEstimate e;
  e.value = mean_;
  e.n_samples = n_;
  e.std_error = n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  return e;
}

std::vector<RngStream> shard_streams(RngStream& rng, unsigned shards) {
  if (shards == 0) throw std::invalid_argument("shard count must be >= 1");
  const RngStream base(rng());
  std::vector<RngStream> out;
  out.reserve(shards);
  for (unsigned s = 0; s < shards; ++s) out.push_back(base.substream(s));
  return out;
}

std::size_t shard_count(std::size_t n_samples, unsigned shards, unsigned shard) {
  return n_samples / shards + (shard < n_samples % shards ? 1 : 0);
}

namespace {

// Runs body(solver, rng, count, acc) on every shard, merging in shard order.
template <typename Body>
ErrorEstimate run_sharded(const LocalSolver& prototype, std::size_t n_samples, RngStream& rng,
                          unsigned shards, Body body) {
  std::vector<RngStream> streams = shard_streams(rng, shards);
  std::vector<MeanAccumulator> acc(shards);
  std::vector<std::exception_ptr> errors(shards);
  auto work = [&](unsigned s) {
    try {
      LocalSolver solver = prototype;
      body(solver, streams[s], shard_count(n_samples, shards, s), acc[s]);
    } catch (...) {
      errors[s] = std::current_exception();
    }
  };
  if (shards == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned s = 0; s < shards; ++s) pool.emplace_back(work, s);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  MeanAccumulator total;
  for (const auto& a : acc) total.merge(a);
  return total.estimate();
}

double segment_dq(const Analytics1d& an, double a, double b) {
  // int_a^b (x - a)(b - x) dP = -M2 + (a + b) M1 - a b M0
  const double m0 = an.partial_moment(0, a, b);
  const double m1 = an.partial_moment(1, a, b);
  const double m2 = an.partial_moment(2, a, b);
  return -m2 + (a + b) * m1 - a * b * m0;
}

double squared_distance_moment(const Analytics1d& an, double center, double a, double b) {
  // int_a^b (x - c)^2 dP
  const double m0 = an.partial_moment(0, a, b);
  const double m1 = an.partial_moment(1, a, b);
  const double m2 = an.partial_moment(2, a, b);
  return m2 - 2.0 * center * m1 + center * center * m0;
}

const Analytics1d& require_analytics(const Distribution& dist) {
  if (dist.dim != 1 || !dist.analytics) {
    throw std::invalid_argument("distribution '" + dist.name + "' has no 1D analytics");
  }
  return *dist.analytics;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void require_ordered_1d(const Grid& grid) {
  if (grid.dim() != 1) throw std::invalid_argument("a one-dimensional grid is required");
  if (grid.size() < 1) throw std::invalid_argument("empty grid");
  for (Index i = 1; i < grid.size(); ++i) {
    if (!(grid[i](0) > grid[i - 1](0))) {
      throw std::invalid_argument("grid must be strictly increasing");
    }
  }
}

ErrorEstimate mc_dq_error(const Grid& grid, const Distribution& dist, const NormSpec& spec,
                          std::size_t n_samples, RngStream& rng, bool extended, unsigned shards) {
  if (dist.dim != grid.dim()) throw std::invalid_argument("grid and distribution dimensions differ");
  const LocalSolver prototype(grid, spec);
  return run_sharded(prototype, n_samples, rng, shards,
                     [&](LocalSolver& solver, RngStream& stream, std::size_t count, MeanAccumulator& acc) {
                       for (std::size_t k = 0; k < count; ++k) {
                         const Point x = dist.sample(stream);
                         if (extended) {
                           acc.add(solver.extended_value(x).value);
                         } else {
                           const auto sol = solver.try_solve(x);
                           if (!sol) throw SampleOutsideHullError("sample outside conv(grid); use the extended error");
                           acc.add(sol->value);
                         }
                       }
                     });
}

ErrorEstimate mc_voronoi_error(const Grid& grid, const Distribution& dist, const NormSpec& spec,
                               std::size_t n_samples, RngStream& rng, unsigned shards) {
  if (dist.dim != grid.dim()) throw std::invalid_argument("grid and distribution dimensions differ");
  std::vector<RngStream> streams = shard_streams(rng, shards);
  MeanAccumulator total;
  for (unsigned s = 0; s < shards; ++s) {
    MeanAccumulator acc;
    const std::size_t count = shard_count(n_samples, shards, s);
    for (std::size_t k = 0; k < count; ++k) {
      const Point x = dist.sample(streams[s]);
      acc.add(norm_p_value(x - grid[nearest_index(grid, x, spec)], spec));
    }
    total.merge(acc);
  }
  return total.estimate();
}

double exact_1d_dq_error(const Grid& grid, const Distribution& dist, Mode1d mode) {
  require_ordered_1d(grid);
  const Analytics1d& an = require_analytics(dist);
  const Index n = grid.size();
  const double first = grid[0](0), last = grid[n - 1](0);
  if (mode == Mode1d::compact) {
    if (!dist.support) throw std::invalid_argument("compact mode requires a bounded support");
    const double slack = 1e-12 * (1.0 + std::max(std::abs(first), std::abs(last)));
    if (dist.support->lo(0) < first - slack || dist.support->hi(0) > last + slack) {
      throw std::invalid_argument("compact mode requires supp(P) within [x_1, x_n]");
    }
  }
  double total = 0.0;
  for (Index i = 0; i + 1 < n; ++i) total += segment_dq(an, grid[i](0), grid[i + 1](0));
  if (mode == Mode1d::extended) {
    total += squared_distance_moment(an, first, -kInf, first);
    total += squared_distance_moment(an, last, last, kInf);
  }
  return total;
}

double exact_1d_voronoi_error(const Grid& grid, const Distribution& dist) {
  require_ordered_1d(grid);
  const Analytics1d& an = require_analytics(dist);
  const Index n = grid.size();
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double x = grid[i](0);
    const double lo = i == 0 ? -kInf : 0.5 * (grid[i - 1](0) + x);
    const double hi = i + 1 == n ? kInf : 0.5 * (x + grid[i + 1](0));
    total += squared_distance_moment(an, x, lo, hi);
  }
  return total;
}

GridWithError theoretical_1d_uniform(int n, double p) {
  if (n < 2) throw std::invalid_argument("theoretical_1d_uniform needs n >= 2");
  if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back(Point::Constant(1, static_cast<double>(i) / (n - 1)));
  const double err = 2.0 / ((p + 1.0) * (p + 2.0)) * std::pow(static_cast<double>(n - 1), -p);
  return {Grid(std::move(pts), {0, static_cast<Index>(n - 1)}), err};
}

GridWithError voronoi_1d_uniform(int n, double p) {
  if (n < 1) throw std::invalid_argument("voronoi_1d_uniform needs n >= 1");
  std::vector<Point> pts;
  for (int i = 1; i <= n; ++i) pts.push_back(Point::Constant(1, (2.0 * i - 1.0) / (2.0 * n)));
  const double err = 1.0 / (std::pow(2.0, p) * (p + 1.0)) * std::pow(static_cast<double>(n), -p);
  return {Grid(std::move(pts)), err};
}

Grid product_grid(const Box& box, int m) {
  if (m < 1) throw std::invalid_argument("product_grid needs m >= 1");
  const Eigen::Index d = box.lo.size();
  if (d == 0 || box.hi.size() != d || !(box.lo.array() < box.hi.array()).all()) {
    throw std::invalid_argument("product_grid needs a non-empty box");
  }
  Index total = 1;
  for (Eigen::Index j = 0; j < d; ++j) total *= static_cast<Index>(m + 1);
  std::vector<Point> pts;
  pts.reserve(total);
  for (Index k = 0; k < total; ++k) {
    Point x(d);
    Index rest = k;
    for (Eigen::Index j = d - 1; j >= 0; --j) {
      const auto i = static_cast<double>(rest % static_cast<Index>(m + 1));
      rest /= static_cast<Index>(m + 1);
      x(j) = i == m ? box.hi(j) : box.lo(j) + i * (box.hi(j) - box.lo(j)) / m;
    }
    pts.push_back(std::move(x));
  }
  return Grid(std::move(pts));
}

double scalar_bound(const Grid& grid, double p) {
  require_ordered_1d(grid);
  double widest = 0.0;
  for (Index i = 0; i + 1 < grid.size(); ++i) widest = std::max(widest, grid[i + 1](0) - grid[i](0));
  return std::pow(widest / 2.0, p);
}

double norm_constant(NormKind kind, double p, int d) {
  // sup ||x||_q over |x|_p = 1 is 1 for q >= p and d^(1/q - 1/p) otherwise.
  double q = 0.0;
  switch (kind) {
    case NormKind::l1: q = 1.0; break;
    case NormKind::l2: q = 2.0; break;
    case NormKind::linf: return 1.0;
  }
  if (q >= p) return 1.0;
  return std::pow(static_cast<double>(d), p / q - 1.0);
}

double product_bound(int d, double edge, int m, const NormSpec& spec) {
  if (d < 1 || m < 1 || !(edge > 0.0)) throw std::invalid_argument("product_bound: invalid box");
  return d * norm_constant(spec.kind, spec.p, d) * std::pow(edge / 2.0, spec.p) *
         std::pow(static_cast<double>(m), -spec.p);
}

double rate_fit(std::span<const double> sizes, std::span<const double> errors, double p) {
  if (sizes.size() != errors.size()) throw std::invalid_argument("rate_fit: length mismatch");
  if (sizes.size() < 3) throw std::invalid_argument("rate_fit needs at least 3 points");
  const auto k = static_cast<double>(sizes.size());
  double sx = 0.0, sy = 0.0;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!(sizes[i] > 0.0) || !(errors[i] > 0.0)) throw std::invalid_argument("rate_fit needs positive values");
    xs.push_back(std::log(sizes[i]));
    ys.push_back(std::log(errors[i]) / p);
    sx += xs.back();
    sy += ys.back();
  }
  const double mx = sx / k, my = sy / k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx <= 0.0) throw std::invalid_argument("rate_fit: sizes must not all be equal");
  return sxy / sxx;
}

}  // namespace dualq
