#include "dualq/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace dualq {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_order(int k) {
  if (k < 0 || k > 2) throw std::invalid_argument("partial moments are available for k = 0, 1, 2");
}

// x * pdf(x) with the limit 0 at +-infinity.
double x_pdf(double x) { return std::isinf(x) ? 0.0 : x * standard_normal_pdf(x); }

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double standard_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double Analytics1d::quantile(double q) const {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile level must be in (0, 1)");
  double lo = -1.0, hi = 1.0;
  while (cdf(lo) > q) lo *= 2.0;
  while (cdf(hi) < q) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Distribution make_uniform_box(const Point& lo, const Point& hi) {
  if (lo.size() != hi.size() || lo.size() == 0) throw std::invalid_argument("uniform box: dimension mismatch");
  if (!(lo.array() < hi.array()).all()) throw std::invalid_argument("uniform box: empty box (need lo < hi)");
  Distribution dist;
  dist.dim = static_cast<int>(lo.size());
  dist.name = "uniform";
  dist.support = Box{lo, hi};
  dist.sampler = [lo, hi](RngStream& rng) {
    Point x(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) x(i) = lo(i) + (hi(i) - lo(i)) * rng.uniform();
    return x;
  };
  if (dist.dim == 1) {
    const double a = lo(0), b = hi(0), len = hi(0) - lo(0);
    Analytics1d an;
    an.cdf = [=](double x) { return std::clamp((x - a) / len, 0.0, 1.0); };
    an.pdf = [=](double x) { return (x >= a && x <= b) ? 1.0 / len : 0.0; };
    an.partial_moment = [=](int k, double from, double to) {
      check_order(k);
      const double l = std::clamp(from, a, b);
      const double u = std::clamp(to, a, b);
      if (u <= l) return 0.0;
      return (std::pow(u, k + 1) - std::pow(l, k + 1)) / ((k + 1) * len);
    };
    dist.analytics = an;
  }
  return dist;
}

Distribution make_normal(const Point& mean, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("normal: scale must be positive");
  if (mean.size() == 0) throw std::invalid_argument("normal: empty mean");
  Distribution dist;
  dist.dim = static_cast<int>(mean.size());
  dist.name = "normal";
  dist.sampler = [mean, scale](RngStream& rng) {
    Point x(mean.size());
    for (Eigen::Index i = 0; i < mean.size(); ++i) x(i) = mean(i) + scale * rng.normal();
    return x;
  };
  if (dist.dim == 1) {
    const double mu = mean(0), s = scale;
    Analytics1d an;
    an.cdf = [=](double x) { return standard_normal_cdf((x - mu) / s); };
    an.pdf = [=](double x) { return standard_normal_pdf((x - mu) / s) / s; };
    an.partial_moment = [=](int k, double from, double to) {
      check_order(k);
      if (to <= from) return 0.0;
      const double ta = (from - mu) / s, tb = (to - mu) / s;
      const double m0 = standard_normal_cdf(tb) - standard_normal_cdf(ta);
      const double m1z = standard_normal_pdf(ta) - standard_normal_pdf(tb);
      const double m2z = m0 + x_pdf(ta) - x_pdf(tb);
      if (k == 0) return m0;
      if (k == 1) return mu * m0 + s * m1z;
      return mu * mu * m0 + 2.0 * mu * s * m1z + s * s * m2z;
    };
    dist.analytics = an;
  }
  return dist;
}

Distribution make_exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be positive");
  Distribution dist;
  dist.dim = 1;
  dist.name = "exponential";
  dist.sampler = [rate](RngStream& rng) {
    Point x(1);
    x(0) = -std::log(rng.uniform_open_left()) / rate;
    return x;
  };
  Analytics1d an;
  an.cdf = [=](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); };
  an.pdf = [=](double x) { return x < 0.0 ? 0.0 : rate * std::exp(-rate * x); };
  an.partial_moment = [=](int k, double from, double to) {
    check_order(k);
    const double l = std::max(from, 0.0);
    if (to <= l) return 0.0;
    // Antiderivatives of x^k rate e^{-rate x}, vanishing at +infinity.
    auto g = [&](double x) {
      if (std::isinf(x)) return 0.0;
      const double e = std::exp(-rate * x);
      if (k == 0) return -e;
      if (k == 1) return -(x + 1.0 / rate) * e;
      return -(x * x + 2.0 * x / rate + 2.0 / (rate * rate)) * e;
    };
    return g(to) - g(l);
  };
  dist.analytics = an;
  return dist;
}

Distribution make_bm_sup() {
  Distribution dist;
  dist.dim = 2;
  dist.name = "bmsup";
  dist.sampler = [](RngStream& rng) {
    // Given W_1 = b, the running maximum has the law (b + sqrt(b^2 - 2 ln U)) / 2.
    Point x(2);
    const double b = rng.normal();
    const double u = rng.uniform_open_left();
    x(0) = b;
    x(1) = 0.5 * (b + std::sqrt(b * b - 2.0 * std::log(u)));
    return x;
  };
  return dist;
}

Distribution make_dirac(const Point& at) {
  Distribution dist;
  dist.dim = static_cast<int>(at.size());
  dist.name = "dirac";
  dist.support = Box{at, at};
  dist.sampler = [at](RngStream&) { return at; };
  return dist;
}

Distribution parse_distribution(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::vector<double> args =
      colon == std::string::npos ? std::vector<double>{} : parse_numbers(text.substr(colon + 1));
  auto expect = [&](std::size_t count) {
    if (args.size() != count) {
      throw std::invalid_argument("distribution '" + kind + "' expects " + std::to_string(count) +
                                  " parameter(s)");
    }
  };
  Distribution dist;
  if (kind == "uniform") {
    expect(2);
    dist = make_uniform_box(Point::Constant(1, args[0]), Point::Constant(1, args[1]));
  } else if (kind == "normal") {
    expect(2);
    dist = make_normal(Point::Constant(1, args[0]), args[1]);
  } else if (kind == "normal2d") {
    expect(0);
    dist = make_normal(Point::Zero(2), 1.0);
  } else if (kind == "uniform2d") {
    expect(0);
    dist = make_uniform_box(Point::Zero(2), Point::Ones(2));
  } else if (kind == "bmsup") {
    expect(0);
    dist = make_bm_sup();
  } else if (kind == "exponential") {
    expect(1);
    dist = make_exponential(args[0]);
  } else {
    throw std::invalid_argument("unknown distribution '" + text + "'");
  }
  dist.name = text;
  return dist;
}

}  // namespace dualq
