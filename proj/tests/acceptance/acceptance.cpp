// Acceptance checks. One PASS/FAIL line per criterion; exit code 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "dualq/cubature.hpp"
#include "dualq/delaunay2d.hpp"
#include "dualq/distributions.hpp"
#include "dualq/error_metrics.hpp"
#include "dualq/local_solver.hpp"
#include "dualq/lp_core.hpp"
#include "dualq/optim1d.hpp"
#include "dualq/optimnd.hpp"
#include "dualq/splitting.hpp"

using namespace dualq;

namespace {

// Pinned tolerances.
constexpr double kGridTol1 = 1e-8;
constexpr double kErrTol1 = 1e-10;
constexpr double kTime1 = 1.0;
constexpr double kRatioRel2 = 0.01;
constexpr double kRatioSlack2 = 1e-12;
constexpr double kLpRel3 = 1e-9;
constexpr double kTime3 = 30.0;
constexpr double kFastRel4 = 1e-9;
constexpr double kCircleRel4 = 1e-9;
constexpr double kStationary5 = 1e-10;
constexpr double kSigmas = 4.0;
constexpr double kCenter7 = 1e-9;
constexpr double kSlope8 = -0.5;
constexpr double kSlopeTol8 = 0.05;
constexpr double kTime8 = 120.0;
constexpr double kTime10 = 120.0;
constexpr double kFdStep11 = 1e-3;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s | %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Point pt(std::initializer_list<double> c) {
  Point p(static_cast<Eigen::Index>(c.size()));
  Eigen::Index i = 0;
  for (double v : c) p(i++) = v;
  return p;
}

Grid uniform_grid_1d(const std::vector<double>& xs) {
  std::vector<Point> pts;
  for (double x : xs) pts.push_back(pt({x}));
  return Grid(pts);
}

Grid random_grid(RngStream& rng, int n, int d) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) {
    Point p(d);
    for (int j = 0; j < d; ++j) p(j) = rng.uniform();
    pts.push_back(p);
  }
  return Grid(pts);
}

Point random_convex(RngStream& rng, const Grid& g) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(g.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = -std::log(rng.uniform_open_left());
  w /= w.sum();
  Point x = Point::Zero(g.dim());
  for (Index i = 0; i < g.size(); ++i) x += w(static_cast<Eigen::Index>(i)) * g[i];
  return x;
}

// Brute force over all (d+1)-subsets with a plain linear solve.
double brute_force_lp(const Grid& g, const Point& xi, const NormSpec& spec) {
  const int d = g.dim();
  const int n = static_cast<int>(g.size());
  std::vector<int> idx(d + 1);
  for (int i = 0; i <= d; ++i) idx[i] = i;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd b(d + 1);
  b.head(d) = xi;
  b(d) = 1.0;
  while (true) {
    Eigen::MatrixXd a(d + 1, d + 1);
    for (int k = 0; k <= d; ++k) {
      a.col(k).head(d) = g[idx[k]];
      a(d, k) = 1.0;
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() == d + 1) {
      const Eigen::VectorXd lambda = lu.solve(b);
      if (lambda.minCoeff() >= -1e-12) {
        double v = 0.0;
        for (int k = 0; k <= d; ++k) v += lambda(k) * norm_p_value(xi - g[idx[k]], spec);
        best = std::min(best, v);
      }
    }
    int k = d;
    while (k >= 0 && idx[k] == n - d - 1 + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int m = k + 1; m <= d; ++m) idx[m] = idx[m - 1] + 1;
  }
  return best;
}

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = Clock::now();
  const Distribution u = make_uniform_box(pt({0}), pt({1}));
  double grid_dev = 0.0, err_dev = 0.0;
  const std::pair<int, double> cases[] = {{3, 1.0 / 24}, {11, 1.0 / 600}};
  for (const auto& [n, target] : cases) {
    const NewtonReport r = newton_solve(u, n, Mode1d::compact);
    for (int i = 0; i < n; ++i) grid_dev = std::max(grid_dev, std::abs(r.grid[i](0) - i / double(n - 1)));
    err_dev = std::max(err_dev, std::abs(exact_1d_dq_error(r.grid, u) - target));
  }
  const double t = seconds_since(t0);
  report(1, "1D uniform exact optimum", grid_dev <= kGridTol1 && err_dev <= kErrTol1 && t < kTime1,
         fmt("max|x-(i-1)/(n-1)|=%.2e", grid_dev) + fmt(" max|err-target|=%.2e", err_dev) + fmt(" time=%.3fs", t));
}

void criterion2() {
  const int n = 101;
  const double dual = exact_1d_dq_error(theoretical_1d_uniform(n, 2).grid, make_uniform_box(pt({0}), pt({1})));
  const double vor = exact_1d_voronoi_error(voronoi_1d_uniform(n, 2).grid, make_uniform_box(pt({0}), pt({1})));
  const double ratio = std::sqrt(dual / vor);
  const double rel = std::abs(ratio - std::sqrt(2.0)) / std::sqrt(2.0);
  report(2, "dual/Voronoi constant at n=101", rel <= kRatioRel2 + kRatioSlack2,
         fmt("ratio=%.12f", ratio) + fmt(" rel.dev=%.15f", rel) + " (limit sqrt2; tol 1% + 1e-12)");
}

void criterion3() {
  const auto t0 = Clock::now();
  RngStream rng(3);
  const NormSpec specs[] = {{NormKind::l2, 2.0}, {NormKind::l2, 1.0}, {NormKind::l1, 2.0}, {NormKind::linf, 1.5}, {NormKind::l2, 3.0}};
  int done = 0;
  double worst = 0.0;
  while (done < 500) {
    const int d = 1 + static_cast<int>(rng() % 3);
    const int n = d + 1 + static_cast<int>(rng() % (8 - d));
    const Grid g = random_grid(rng, n, d);
    if (numerical_rank(g.extended_matrix()) < d + 1) continue;
    const Point xi = random_convex(rng, g);
    const NormSpec& spec = specs[done % 5];
    const double v = local_dq_value(g, xi, spec);
    const double oracle = brute_force_lp(g, xi, spec);
    worst = std::max(worst, std::abs(v - oracle) / (1.0 + v));
    ++done;
  }
  const double t = seconds_since(t0);
  report(3, "LP vs basis enumeration (500 instances)", worst <= kLpRel3 && t < kTime3,
         fmt("max rel.diff=%.2e", worst) + fmt(" time=%.3fs", t));
}

void criterion4() {
  RngStream rng(4);
  double worst = 0.0, circle = 0.0;
  int queries = 0;
  for (int k = 0; k < 10; ++k) {
    const Grid g = random_grid(rng, 30, 2);
    const Triangulation tri = triangulate(g);
    for (int q = 0; q < 200; ++q) {
      const Point xi = random_convex(rng, g);
      const double fast = dq_solve_delaunay(g, tri, xi).value;
      const double lp = local_dq_value(g, xi, NormSpec());
      worst = std::max(worst, std::abs(fast - lp) / (1.0 + lp));
      ++queries;
    }
    for (const auto& t : tri.triangles()) {
      // Circumcircle from the perpendicular bisector equations.
      const Point a = g[t[0]], b = g[t[1]], c = g[t[2]];
      Eigen::Matrix2d m;
      m << 2 * (b - a).transpose(), 2 * (c - a).transpose();
      const Eigen::Vector2d rhs(b.squaredNorm() - a.squaredNorm(), c.squaredNorm() - a.squaredNorm());
      const Eigen::Vector2d z = m.fullPivLu().solve(rhs);
      const double r = (Eigen::Vector2d(a) - z).norm();
      for (Index j = 0; j < g.size(); ++j) {
        if (j == t[0] || j == t[1] || j == t[2]) continue;
        circle = std::max(circle, (r - (Eigen::Vector2d(g[j]) - z).norm()) / r);
      }
    }
  }
  report(4, "Delaunay fast path vs LP and empty circles", worst <= kFastRel4 && circle <= kCircleRel4,
         fmt("queries=%.0f", queries) + fmt(" max rel.diff=%.2e", worst) + fmt(" max intrusion=%.2e", circle));
}

void criterion5() {
  RngStream rng(5);
  const Grid g = random_grid(rng, 20, 2);
  LocalSolver solver(g, NormSpec());
  double worst = 0.0;
  for (int q = 0; q < 100; ++q) {
    const Point xi = random_convex(rng, g);
    const LocalSolution s = solver.solve(xi);
    Point m = Point::Zero(2);
    for (Index k = 0; k < s.basis.size(); ++k) m += s.weights(static_cast<Eigen::Index>(k)) * g[s.basis[k]];
    worst = std::max(worst, (m - xi).cwiseAbs().maxCoeff());
  }
  double zmax = 0.0;
  for (int q = 0; q < 3; ++q) {
    const Point xi = random_convex(rng, g);
    const int n = 100000;
    Point sum = Point::Zero(2), sq = Point::Zero(2);
    for (int i = 0; i < n; ++i) {
      const Point v = g[split(solver, xi, rng).vertex];
      sum += v;
      sq += v.cwiseProduct(v);
    }
    const Point mean = sum / n;
    for (int j = 0; j < 2; ++j) {
      const double se = std::sqrt((sq(j) / n - mean(j) * mean(j)) / (n - 1));
      zmax = std::max(zmax, std::abs(mean(j) - xi(j)) / se);
    }
  }
  report(5, "intrinsic stationarity", worst <= kStationary5 && zmax <= kSigmas,
         fmt("max|sum lambda x - xi|=%.2e", worst) + fmt(" max split-mean z=%.2f", zmax));
}

void criterion6() {
  const ScalarFunction quad = [](const Point& x) { return x.squaredNorm(); };
  const ScalarFunction affine = [](const Point& x) { return 1.5 * x.sum() - 0.25; };
  std::string detail;
  bool ok = true;
  auto check = [&](const char* name, const Grid& g, const Distribution& d, std::uint64_t seed, double target) {
    RngStream rng(seed);
    const SecondOrderReport q = second_order_report(g, d, NormSpec(), quad, 2.0, 200000, rng);
    const double comb = std::hypot(q.cubature_std_error, q.dual_std_error);
    const double z = std::abs(q.cubature_error - q.dual_error) / comb;
    ok = ok && z <= kSigmas;
    detail += std::string(name) + fmt(": err=%.6f", q.cubature_error) + fmt(" d2=%.6f", q.dual_error) + fmt(" z=%.2f", z);
    if (target > 0) {
      const double zt = std::abs(q.cubature_error - target) / q.cubature_std_error;
      ok = ok && zt <= kSigmas;
      detail += fmt(" z(1/6)=%.2f", zt);
    }
    RngStream rng2(seed + 100);
    const SecondOrderReport a = second_order_report(g, d, NormSpec(), affine, 0.0, 200000, rng2);
    const double za = std::abs(a.cubature_error) / a.cubature_std_error;
    ok = ok && za <= kSigmas;
    detail += fmt(" affine z=%.2f; ", za);
  };
  check("{0,1}", uniform_grid_1d({0, 1}), make_uniform_box(pt({0}), pt({1})), 61, 1.0 / 6);
  RngStream g_rng(62);
  std::vector<Point> pts = box_corners(Box{pt({0, 0}), pt({1, 1})});
  for (int i = 0; i < 12; ++i) pts.push_back(pt({g_rng.uniform(), g_rng.uniform()}));
  check("random 2D", Grid(pts), make_uniform_box(pt({0, 0}), pt({1, 1})), 63, -1);
  report(6, "second-order cubature identity", ok, detail);
}

void criterion7() {
  RngStream rng(7);
  double worst1 = -1.0, worst2 = -1.0;
  for (int k = 0; k < 20; ++k) {
    std::vector<double> xs{0.0};
    const int n = 3 + k % 6;
    for (int i = 1; i < n; ++i) xs.push_back(xs.back() + 0.02 + rng.uniform());
    const Grid g = uniform_grid_1d(xs);
    double gap = 0.0;
    for (int i = 1; i < n; ++i) gap = std::max(gap, xs[i] - xs[i - 1]);
    const double bound = gap * gap / 4.0;
    LocalSolver solver(g, NormSpec());
    double mx = 0.0;
    for (int s = 0; s < 100000; ++s) mx = std::max(mx, solver.solve(pt({xs.back() * rng.uniform()})).value);
    worst1 = std::max(worst1, mx / bound);
  }
  const int ms[] = {1, 2, 3, 5, 8};
  for (int m : ms) {
    const double edge = 2.0;
    const Grid g = product_grid(Box{pt({0, 0}), pt({edge, edge})}, m);
    const double bound = 2.0 * 1.0 * (edge / 2) * (edge / 2) / (m * m);
    LocalSolver solver(g, NormSpec());
    double mx = 0.0;
    for (int s = 0; s < 100000; ++s) mx = std::max(mx, solver.solve(pt({edge * rng.uniform(), edge * rng.uniform()})).value);
    worst2 = std::max(worst2, mx / bound);
  }
  const Grid sq = product_grid(Box{pt({0, 0}), pt({1, 1})}, 1);
  const double center = local_dq_value(sq, pt({0.5, 0.5}), NormSpec());
  const double lib_bound = product_bound(2, 1.0, 1, NormSpec());
  const bool tight = std::abs(center - 0.5) <= kCenter7 && std::abs(lib_bound - 0.5) <= kCenter7;
  report(7, "scalar and product bounds", worst1 <= 1.0 && worst2 <= 1.0 && tight,
         fmt("max F/scalar bound=%.6f", worst1) + fmt(" max F/product bound=%.6f", worst2) +
             fmt(" F(center)=%.12f", center) + fmt(" bound=%.12f", lib_bound));
}

void criterion8() {
  const auto t0 = Clock::now();
  const Distribution u2 = make_uniform_box(pt({0, 0}), pt({1, 1}));
  std::vector<double> cells, points, errors;
  std::string rows;
  for (int m : {1, 2, 4, 8}) {
    const Grid g = product_grid(*u2.support, m);
    RngStream rng(800 + m);
    const ErrorEstimate e = mc_dq_error(g, u2, NormSpec(), 1000000, rng, false);
    cells.push_back(double(m) * m);
    points.push_back(double(g.size()));
    errors.push_back(e.value);
    rows += fmt("m=%.0f:", m) + fmt("%.6f ", e.value);
  }
  const double slope_cells = rate_fit(cells, errors, 2.0);
  const double slope_points = rate_fit(points, errors, 2.0);
  const double t = seconds_since(t0);
  report(8, "product-grid rate slope", std::abs(slope_cells - kSlope8) <= kSlopeTol8 && t < kTime8,
         rows + fmt("slope vs m^d=%.4f", slope_cells) + fmt(" (vs (m+1)^d: %.4f)", slope_points) + fmt(" time=%.1fs", t));
}

void criterion9() {
  const Distribution u = make_uniform_box(pt({0}), pt({1}));
  double prev = std::numeric_limits<double>::infinity();
  bool ok = true;
  std::string detail;
  for (int n = 3; n <= 10; ++n) {
    const double e = exact_1d_dq_error(newton_solve(u, n, Mode1d::compact).grid, u);
    ok = ok && e < prev;
    prev = e;
    detail += fmt("%.3e ", e);
  }
  report(9, "strictly decreasing optimal errors n=3..10", ok, detail);
}

void criterion10() {
  const Distribution u2 = make_uniform_box(pt({0, 0}), pt({1, 1}));
  TrainConfig cfg;
  cfg.steps = 1000000;
  cfg.seed = 10;
  cfg.anchors = box_corners(*u2.support);
  cfg.refine = RefineConfig{};
  const auto t0 = Clock::now();
  const TrainReport a = train(u2, 16, cfg);
  const double t = seconds_since(t0);
  const TrainReport b = train(u2, 16, cfg);
  bool same = true;
  for (Index i = 0; i < 16; ++i) same = same && a.grid[i] == b.grid[i];
  auto eval = [&](const Grid& g) {
    RngStream rng(1010);
    return mc_dq_error(g, u2, NormSpec(), 200000, rng, false);
  };
  const ErrorEstimate fin = eval(a.grid);
  const ErrorEstimate init = eval(a.initial_grid);
  const ErrorEstimate corners = eval(product_grid(*u2.support, 1));
  const bool ok = fin.value < init.value && fin.value < corners.value && fin.value < 1.0 / 3 && same && t < kTime10;
  report(10, "CVLQ training improves the grid", ok,
         fmt("final=%.6f", fin.value) + fmt(" initial=%.6f", init.value) + fmt(" corners=%.6f", corners.value) +
             fmt(" outside=%.3f", a.outside_fraction) + (same ? " reproducible" : " NOT reproducible") + fmt(" time=%.1fs", t));
}

void criterion11() {
  // 2D: gradient against common-random-number central differences. The law
  // sits strictly inside the hull, so moving any grid point keeps every
  // sample interior.
  RngStream grid_rng(11);
  std::vector<Point> pts = box_corners(Box{pt({0, 0}), pt({1, 1})});
  for (int i = 0; i < 8; ++i) pts.push_back(pt({0.1 + 0.8 * grid_rng.uniform(), 0.1 + 0.8 * grid_rng.uniform()}));
  const Grid g(pts);
  const Distribution u2 = make_uniform_box(pt({0.15, 0.15}), pt({0.85, 0.85}));
  const std::size_t n = 200000;
  RngStream srng(1111);
  std::vector<Point> samples;
  for (std::size_t k = 0; k < n; ++k) samples.push_back(u2.sample(srng));
  const McGradient grad = sample_gradient(g, samples, NormSpec(), true);
  double zmax2 = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    for (int j = 0; j < 2; ++j) {
      Grid plus = g, minus = g;
      Point p = g[i], m = g[i];
      p(j) += kFdStep11;
      m(j) -= kFdStep11;
      plus.set_point(i, p);
      minus.set_point(i, m);
      LocalSolver sp(plus, NormSpec()), sm(minus, NormSpec());
      MeanAccumulator diff;
      for (const auto& x : samples) diff.add((sp.extended_value(x).value - sm.extended_value(x).value) / (2 * kFdStep11));
      const ErrorEstimate fd = diff.estimate();
      const double se = std::hypot(fd.std_error, grad.std_error(static_cast<Eigen::Index>(i), j));
      zmax2 = std::max(zmax2, std::abs(fd.value - grad.value(static_cast<Eigen::Index>(i), j)) / se);
    }
  }
  // 1D: against the closed-form gradient of the uniform dual error.
  const std::vector<double> xs{0.0, 0.3, 0.55, 0.7, 1.0};
  const Grid g1 = uniform_grid_1d(xs);
  RngStream rng1(1112);
  const McGradient m1 = mc_gradient(g1, make_uniform_box(pt({0}), pt({1})), NormSpec(), 400000, rng1, true);
  double zmax1 = 0.0;
  const std::size_t last = xs.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    double exact;
    if (i == 0) {
      exact = -(xs[1] - xs[0]) * (xs[1] - xs[0]) / 2;
    } else if (i == last) {
      exact = (xs[last] - xs[last - 1]) * (xs[last] - xs[last - 1]) / 2;
    } else {
      const double a = xs[i - 1], x = xs[i], b = xs[i + 1];
      exact = (b * b - a * a) / 2 - a * (x - a) - b * (b - x);
    }
    const double se = m1.std_error(static_cast<Eigen::Index>(i), 0);
    zmax1 = std::max(zmax1, std::abs(m1.value(static_cast<Eigen::Index>(i), 0) - exact) / se);
  }
  report(11, "gradient formula vs finite differences and 1D exact", zmax2 <= kSigmas && zmax1 <= kSigmas,
         fmt("2D max z=%.2f", zmax2) + fmt(" 1D max z=%.2f", zmax1));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<void()>> all = {criterion1, criterion2, criterion3, criterion4,
                                                  criterion5, criterion6, criterion7, criterion8,
                                                  criterion9, criterion10, criterion11};
  // An optional argument selects a single criterion.
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (only != 0 && static_cast<std::size_t>(only) != i + 1) continue;
    try {
      all[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), "exception", false, e.what());
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
