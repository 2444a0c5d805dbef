#include <doctest.h>

#include <cmath>

#include "dualq/errors.hpp"
#include "dualq/lp_core.hpp"
#include "dualq/simplex.hpp"
#include "helpers.hpp"

using namespace dualq;
using testutil::grid;
using testutil::grid1d;
using testutil::pt;

TEST_SUITE("lp_core") {
  TEST_CASE("simplex on a small textbook problem") {
    // min -x1 - x2 s.t. x1 + 2 x2 + s1 = 4, 3 x1 + x2 + s2 = 6
    Eigen::MatrixXd a(2, 4);
    a << 1, 2, 1, 0, 3, 1, 0, 1;
    Eigen::VectorXd b(2);
    b << 4, 6;
    Eigen::VectorXd c(4);
    c << -1, -1, 0, 0;
    const simplex::Result r = simplex::solve(a, b, c, 1e-12);
    REQUIRE(r.feasible);
    CHECK(r.value == doctest::Approx(-2.8));
    CHECK(r.x(0) == doctest::Approx(1.6));
    CHECK(r.x(1) == doctest::Approx(1.2));
    CHECK(b.dot(r.dual) == doctest::Approx(r.value));
    Eigen::VectorXd bad(2);
    bad << -1, 6;
    CHECK_FALSE(simplex::find_feasible(a, bad, 1e-12).feasible);
  }

  TEST_CASE("segment example") {
    const LocalSolution s = local_dq_solve(grid1d({0, 1}), pt({0.25}), NormSpec());
    CHECK(s.weights(0) == doctest::Approx(0.75));
    CHECK(s.weights(1) == doctest::Approx(0.25));
    CHECK(s.value == doctest::Approx(0.1875));
    CHECK(s.u1.dot(pt({0.25})) + s.u2 == doctest::Approx(s.value));
  }

  TEST_CASE("triangle example with dual") {
    const Grid tri = grid({{0, 0}, {1, 0}, {0, 1}});
    const LocalSolution s = local_dq_solve(tri, pt({1.0 / 3, 1.0 / 3}), NormSpec());
    CHECK(s.value == doctest::Approx(4.0 / 9));
    CHECK(s.u1(0) == doctest::Approx(1.0 / 3));
    CHECK(s.u1(1) == doctest::Approx(1.0 / 3));
    const LocalSolution v = local_dq_solve(tri, tri[1], NormSpec());
    CHECK(std::abs(v.value) < 1e-12);
    for (Index k = 0; k < v.basis.size(); ++k) {
      CHECK(v.weights(static_cast<Eigen::Index>(k)) == doctest::Approx(v.basis[k] == 1 ? 1.0 : 0.0));
    }
  }

  TEST_CASE("values") {
    const NormSpec q;
    CHECK(local_dq_value(grid1d({0, 1}), pt({0.5}), q) == doctest::Approx(0.25));
    CHECK(local_dq_value(grid1d({0, 0.5, 1}), pt({0.75}), q) == doctest::Approx(0.0625));
    const Grid sq = grid({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    CHECK(local_dq_value(sq, pt({0.5, 0.5}), q) == doctest::Approx(0.5));
  }

  TEST_CASE("extended values") {
    const NormSpec q;
    const ExtendedValue out = local_dq_value_extended(grid1d({0, 1}), pt({2.0}), q);
    CHECK(out.value == doctest::Approx(1.0));
    CHECK(out.mode == EvalMode::exterior);
    const ExtendedValue in = local_dq_value_extended(grid1d({0, 1}), pt({0.5}), q);
    CHECK(in.value == doctest::Approx(0.25));
    CHECK(in.mode == EvalMode::interior);
    const ExtendedValue t = local_dq_value_extended(grid({{0, 0}, {1, 0}, {0, 1}}), pt({1, 1}), q);
    // Nearest vertices (1,0) and (0,1) are both at squared distance 1.
    CHECK(t.value == doctest::Approx(1.0));
    CHECK(t.mode == EvalMode::exterior);
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(local_dq_solve(grid1d({0, 1}), pt({1.5}), NormSpec()), InfeasibleError);
    CHECK_THROWS_AS(local_dq_solve(grid({{0, 0}, {1, 1}, {2, 2}}), pt({0.5, 0.5}), NormSpec()), FlatGridError);
    CHECK_THROWS_AS(enumerate_bases_oracle(grid1d({0, 1}), pt({3.0}), NormSpec()), InfeasibleError);
    CHECK(enumerate_bases_oracle(grid1d({0, 1}), pt({0.25}), NormSpec()) == doctest::Approx(0.1875));
    RngStream rng(1);
    const Grid big = testutil::random_grid(rng, 40, 3);
    CHECK_THROWS_AS(enumerate_bases_oracle(big, big[0], NormSpec(), 1000), BudgetExceededError);
  }

  TEST_CASE("oracle equivalence, duality and lower bound") {
    RngStream rng(2024);
    const NormSpec specs[] = {{NormKind::l2, 2.0}, {NormKind::l2, 1.0}, {NormKind::l1, 1.5}, {NormKind::linf, 3.0}};
    for (int k = 0; k < 200; ++k) {
      const int d = 1 + k % 3;
      const int n = d + 1 + static_cast<int>(rng() % (8 - d));
      const Grid g = testutil::random_grid(rng, n, d);
      if (numerical_rank(g.extended_matrix()) < d + 1) continue;
      const Point xi = testutil::random_convex(rng, g);
      const NormSpec& spec = specs[k % 4];
      const LocalSolution s = local_dq_solve(g, xi, spec);
      const double oracle = enumerate_bases_oracle(g, xi, spec);
      CHECK(std::abs(s.value - oracle) <= 1e-9 * (1 + s.value));
      CHECK(s.u1.dot(xi) + s.u2 == doctest::Approx(s.value).epsilon(1e-9));
      // Dual feasibility: every slack is non-negative.
      CHECK(dual_slacks(g, xi, spec, s).minCoeff() >= -1e-9);
      CHECK(s.weights.minCoeff() >= -1e-12);
      CHECK(s.weights.sum() == doctest::Approx(1.0));
      double nn = INFINITY;
      for (const auto& p : g.points()) nn = std::min(nn, norm_p_value(xi - p, spec));
      CHECK(s.value >= nn - 1e-12);
    }
  }

  TEST_CASE("adding a point never increases the value") {
    RngStream rng(9);
    for (int k = 0; k < 100; ++k) {
      const Grid g = testutil::random_grid(rng, 5, 2);
      const Point xi = testutil::random_convex(rng, g);
      std::vector<Point> more = g.points();
      more.push_back(testutil::pt({rng.uniform(), rng.uniform()}));
      const Grid g2(more);
      CHECK(local_dq_value(g2, xi, NormSpec()) <= local_dq_value(g, xi, NormSpec()) + 1e-12);
    }
  }

  TEST_CASE("tie-break picks the lexicographically smallest basis") {
    const Grid sq = grid({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    // The centre lies on both diagonals; {0,1,2} is the smallest optimal basis.
    const LocalSolution s = local_dq_solve(sq, pt({0.5, 0.5}), NormSpec());
    CHECK(s.basis == std::vector<Index>{0, 1, 2});
    const LocalSolution t = local_dq_solve(sq, pt({0.3, 0.3}), NormSpec());
    CHECK(t.basis == std::vector<Index>{0, 1, 2});
    CHECK(t.value == doctest::Approx(0.3 * 0.7 * 2));
  }

  TEST_CASE("optimality regions") {
    const Grid sq = grid({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    const NormSpec q;
    const std::vector<Index> lower{0, 1, 2};
    CHECK(optimality_region_contains(sq, lower, pt({0.2, 0.2}), q));
    CHECK(optimality_region_contains(sq, lower, sq[1], q));
    CHECK_FALSE(optimality_region_contains(sq, lower, pt({0.9, 0.9}), q));
    CHECK_THROWS_AS(optimality_region_contains(sq, std::vector<Index>{0, 1}, pt({0.2, 0.2}), q), std::invalid_argument);
  }

  TEST_CASE("non-degeneracy predicate") {
    const NormSpec q;
    CHECK_FALSE(is_nondegenerate(grid({{0, 0}, {1, 0}, {0, 1}, {1, 1}}), pt({0.3, 0.3}), q));
    CHECK(is_nondegenerate(grid({{0, 0}, {1, 0}, {0.5, 1}}), pt({0.5, 0.3}), q));
    CHECK(is_nondegenerate(grid({{0, 0}, {1, 0}, {0, 1}, {1.1, 1.1}}), pt({0.3, 0.2}), q));
    CHECK_THROWS_AS(is_nondegenerate(grid({{0, 0}, {1, 0}, {0.5, 1}}), pt({2, 2}), q), InfeasibleError);
  }

  TEST_CASE("scalar bound and product additivity") {
    RngStream rng(4);
    const NormSpec q;
    for (int k = 0; k < 20; ++k) {
      std::vector<double> xs{0.0};
      for (int i = 0; i < 5; ++i) xs.push_back(xs.back() + 0.05 + rng.uniform());
      std::vector<Point> pts;
      double gap = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        pts.push_back(pt({xs[i]}));
        if (i) gap = std::max(gap, xs[i] - xs[i - 1]);
      }
      const Grid g(pts);
      for (int s = 0; s < 50; ++s) {
        const double x = xs.back() * rng.uniform();
        CHECK(local_dq_value(g, pt({x}), q) <= gap * gap / 4 + 1e-12);
      }
    }
    // Product of {0, 0.3, 1} and {0, 0.5, 2} with the quadratic Euclidean cost.
    const double ax[] = {0, 0.3, 1}, bx[] = {0, 0.5, 2};
    std::vector<Point> prod;
    for (double a : ax)
      for (double b : bx) prod.push_back(pt({a, b}));
    const Grid pg(prod);
    for (int s = 0; s < 50; ++s) {
      const double u = rng.uniform(), v = 2 * rng.uniform();
      const double sum = local_dq_value(testutil::grid1d({0, 0.3, 1}), pt({u}), q) +
                         local_dq_value(testutil::grid1d({0, 0.5, 2}), pt({v}), q);
      CHECK(local_dq_value(pg, pt({u, v}), q) == doctest::Approx(sum).epsilon(1e-9));
    }
  }

  TEST_CASE("nearest index ties") {
    CHECK(nearest_index(grid1d({0, 1}), pt({0.5}), NormSpec()) == 0);
    CHECK(nearest_index(grid1d({0, 1}), pt({0.6}), NormSpec()) == 1);
  }
}
