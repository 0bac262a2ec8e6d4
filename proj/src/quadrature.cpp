#include "lcefem/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lce {

const TriangleRule& triangle_rule_degree5() {
  static const TriangleRule rule = [] {
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0;
    const double a2 = (6.0 + s15) / 21.0;
    const double w1 = (155.0 - s15) / 1200.0;
    const double w2 = (155.0 + s15) / 1200.0;
    TriangleRule r;
    r.degree = 5;
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(9.0 / 40.0);
    for (double a : {a1, a2}) {
      const double b = 1.0 - 2.0 * a;
      const double w = (a == a1) ? w1 : w2;
      r.points.push_back({b, a, a});
      r.points.push_back({a, b, a});
      r.points.push_back({a, a, b});
      r.weights.insert(r.weights.end(), 3, w);
    }
    return r;
  }();
  return rule;
}

LineRule gauss_legendre_unit(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_unit: n must be >= 1");
  LineRule r;
  r.points.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n starting from the Chebyshev-like guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = (n == 1) ? x : p1;
      const double pnm1 = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.points[i] = 0.5 * (1.0 - x);
    r.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);  // (2 / ...) * 0.5
  }
  return r;
}

TriangleRule collapsed_gauss_rule(int n) {
  const LineRule g = gauss_legendre_unit(n);
  TriangleRule r;
  r.degree = 2 * n - 2;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double s = g.points[i];
      const double u = g.points[j] * (1.0 - s);
      // Reference triangle area is 1/2; weights normalised to sum to one.
      r.points.push_back({1.0 - s - u, s, u});
      r.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - s));
    }
  }
  return r;
}

}  // namespace lce
