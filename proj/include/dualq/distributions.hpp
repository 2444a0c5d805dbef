#pragma once

#include <functional>
#include <optional>
#include <string>

#include "dualq/geometry.hpp"
#include "dualq/rng.hpp"

namespace dualq {

// Closed-form one-dimensional integrals of a law P on the real line.
// partial_moment(k, a, b) = int_a^b x^k P(dx) for k in {0, 1, 2}; a, b may be infinite.
struct Analytics1d {
  std::function<double(double)> cdf;
  std::function<double(double)> pdf;
  std::function<double(int, double, double)> partial_moment;

  // Generalized inverse of the cdf by bisection.
  double quantile(double q) const;
};

struct Box {
  Point lo;
  Point hi;
};

struct Distribution {
  std::string name;
  int dim = 1;
  std::function<Point(RngStream&)> sampler;
  std::optional<Box> support;  // nullopt = unbounded
  std::optional<Analytics1d> analytics;

  Point sample(RngStream& rng) const { return sampler(rng); }
};

Distribution make_uniform_box(const Point& lo, const Point& hi);
Distribution make_normal(const Point& mean, double scale);
Distribution make_exponential(double rate);
// Joint law of (W_1, sup_{[0,1]} W) for a standard Brownian motion W.
Distribution make_bm_sup();
// Unit point mass, used for degenerate cubature checks.
Distribution make_dirac(const Point& at);

// "uniform:lo,hi", "normal:mu,sigma", "normal2d", "uniform2d", "bmsup", "exponential:lambda".
Distribution parse_distribution(const std::string& text);

double standard_normal_cdf(double x);
double standard_normal_pdf(double x);

}  // namespace dualq
