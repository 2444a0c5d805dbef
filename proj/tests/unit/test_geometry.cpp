#include <doctest.h>

#include <cmath>

#include "dualq/errors.hpp"
#include "dualq/geometry.hpp"
#include "helpers.hpp"

using namespace dualq;
using testutil::grid;
using testutil::grid1d;
using testutil::pt;

TEST_SUITE("geometry") {
  TEST_CASE("affine basis detection") {
    const Grid tri = grid({{0, 0}, {1, 0}, {0, 1}});
    const std::vector<Index> all{0, 1, 2};
    CHECK(is_affine_basis(tri, all));
    const Grid line = grid({{0, 0}, {1, 0}, {2, 0}});
    CHECK_FALSE(is_affine_basis(line, all));
    const Grid sq = grid({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    const std::vector<Index> i124{0, 1, 3};
    CHECK(is_affine_basis(sq, i124));
    // Hand determinant of [[0,1,1],[0,0,1],[1,1,1]].
    CHECK(std::abs(extended_matrix(sq, i124).determinant()) == doctest::Approx(1.0));
  }

  TEST_CASE("barycentric solve") {
    const Grid tri = grid({{0, 0}, {1, 0}, {0, 1}});
    const AffineBasis b(tri, {0, 1, 2});
    const Eigen::VectorXd w = barycentric_solve(b, tri, pt({1.0 / 3, 1.0 / 3}));
    for (int i = 0; i < 3; ++i) CHECK(w(i) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    const Eigen::VectorXd v = barycentric_solve(b, tri, tri[2]);
    CHECK(v(2) == doctest::Approx(1.0));
    CHECK(std::abs(v(0)) < 1e-15);
    const Grid seg = grid1d({0, 1});
    const Eigen::VectorXd s = barycentric_solve(AffineBasis(seg, {0, 1}), seg, pt({0.25}));
    CHECK(s(0) == doctest::Approx(0.75));
    CHECK(s(1) == doctest::Approx(0.25));
  }

  TEST_CASE("barycentric reproduction on random inputs") {
    RngStream rng(11);
    for (int k = 0; k < 200; ++k) {
      const int d = 1 + static_cast<int>(k % 3);
      const Grid g = testutil::random_grid(rng, d + 1, d);
      std::vector<Index> idx(d + 1);
      for (int i = 0; i <= d; ++i) idx[i] = i;
      if (!is_affine_basis(g, idx)) continue;
      const AffineBasis b(g, idx);
      Point xi(d);
      for (int j = 0; j < d; ++j) xi(j) = 2.0 * rng.uniform() - 0.5;
      const Eigen::VectorXd w = barycentric_solve(b, g, xi);
      Point rec = Point::Zero(d);
      for (int i = 0; i <= d; ++i) rec += w(i) * g[idx[i]];
      CHECK((rec - xi).norm() <= 1e-10 * (1 + xi.norm()));
      CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("convex hull membership") {
    const Grid tri = grid({{0, 0}, {1, 0}, {0, 1}});
    CHECK(in_convex_hull(tri, pt({0.2, 0.2})));
    CHECK_FALSE(in_convex_hull(tri, pt({1, 1})));
    CHECK(in_convex_hull(grid1d({0, 1}), pt({1.0})));
    for (const auto& p : tri.points()) CHECK(in_convex_hull(tri, p));
  }

  TEST_CASE("circumcenter") {
    const std::vector<Point> v{pt({0, 0}), pt({1, 0}), pt({0, 1})};
    const Sphere s = circumcenter(v);
    CHECK(s.center(0) == doctest::Approx(0.5));
    CHECK(s.center(1) == doctest::Approx(0.5));
    CHECK(s.radius == doctest::Approx(std::sqrt(0.5)));
    const Sphere m = circumcenter(std::vector<Point>{pt({0}), pt({1})});
    CHECK(m.center(0) == doctest::Approx(0.5));
    CHECK(m.radius == doctest::Approx(0.5));
    const Sphere e = circumcenter(std::vector<Point>{pt({0, 0}), pt({1, 0}), pt({0.5, std::sqrt(3.0) / 2})});
    CHECK(e.radius == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK_THROWS_AS(circumcenter(std::vector<Point>{pt({0, 0}), pt({1, 0}), pt({2, 0})}), DegenerateError);

    RngStream rng(3);
    for (int k = 0; k < 100; ++k) {
      std::vector<Point> vs;
      for (int i = 0; i < 4; ++i) vs.push_back(pt({rng.uniform(), rng.uniform(), rng.uniform()}));
      const Sphere r = circumcenter(vs);
      for (const auto& q : vs) CHECK(std::abs((q - r.center).norm() - r.radius) <= 1e-9 * (1 + r.radius));
    }
  }

  TEST_CASE("norms and gradients") {
    const NormSpec l2(NormKind::l2, 2.0);
    CHECK(norm_p_value(pt({3, 4}), l2) == doctest::Approx(25.0));
    const Point g = norm_p_gradient(pt({3, 4}), l2);
    CHECK(g(0) == doctest::Approx(6.0));
    CHECK(g(1) == doctest::Approx(8.0));
    CHECK(norm_p_value(pt({1, -2}), NormSpec(NormKind::l1, 1.0)) == doctest::Approx(3.0));
    const NormSpec l2p3(NormKind::l2, 3.0);
    CHECK(norm_p_value(pt({1, 0}), l2p3) == doctest::Approx(1.0));
    CHECK(norm_p_gradient(pt({1, 0}), l2p3)(0) == doctest::Approx(3.0));
    CHECK(norm_value(pt({1, -3}), NormSpec(NormKind::linf, 1.0)) == doctest::Approx(3.0));
    CHECK_THROWS_AS(norm_p_gradient(pt({0, 1}), NormSpec(NormKind::l1, 1.0)), NonSmoothError);
    CHECK_THROWS_AS(norm_p_gradient(pt({1, -1}), NormSpec(NormKind::linf, 2.0)), NonSmoothError);
    CHECK_THROWS_AS(NormSpec(NormKind::l2, 0.5), std::invalid_argument);
  }

  TEST_CASE("gradient matches central differences") {
    RngStream rng(5);
    const NormSpec specs[] = {{NormKind::l2, 2.0}, {NormKind::l2, 3.0}, {NormKind::l1, 2.5}, {NormKind::linf, 2.0}, {NormKind::l2, 1.5}};
    const double h = 1e-5;
    for (const auto& spec : specs) {
      for (int k = 0; k < 100; ++k) {
        const Point x = pt({2 * rng.uniform() - 1, 2 * rng.uniform() - 1, 2 * rng.uniform() - 1});
        const Point g = norm_p_gradient(x, spec);
        for (int j = 0; j < 3; ++j) {
          Point a = x, b = x;
          a(j) += h;
          b(j) -= h;
          const double fd = (norm_p_value(a, spec) - norm_p_value(b, spec)) / (2 * h);
          CHECK(std::abs(fd - g(j)) <= 1e-5 * (1 + g.norm()));
        }
      }
    }
  }

  TEST_CASE("diameter") {
    const NormSpec l2;
    CHECK(diameter(grid1d({0, 1}), l2) == doctest::Approx(1.0));
    CHECK(diameter(grid({{0, 0}, {1, 0}, {0, 1}, {1, 1}}), l2) == doctest::Approx(std::sqrt(2.0)));
    CHECK(diameter(grid1d({0.3}), l2) == 0.0);
  }

  TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(grid({{0, 0}, {1, 0}, {0, 0}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(grid({{0, 0}, {1}}), std::invalid_argument);
    CHECK_THROWS_AS(Grid({pt({0.0}), pt({1.0})}, {2}), std::out_of_range);
    CHECK_THROWS_AS(grid1d({0, NAN}), std::invalid_argument);
    const Grid g = grid({{0, 0}, {1, 0}, {0, 1}});
    const Eigen::MatrixXd m = g.extended_matrix();
    CHECK(m.rows() == 3);
    CHECK(m.row(2).sum() == 3.0);
    CHECK(numerical_rank(m) == 3);
  }
}
