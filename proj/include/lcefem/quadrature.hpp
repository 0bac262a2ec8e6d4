#pragma once

#include <array>
#include <vector>

namespace lce {

/// Quadrature on the unit triangle in barycentric coordinates.  Weights sum
/// to one, so a physical integral is area * sum(w_q f(x_q)).
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// 7-point symmetric rule, exact for polynomials of degree <= 5.
const TriangleRule& triangle_rule_degree5();

/// Collapsed (Duffy) Gauss-Legendre product rule with `n` points per
/// direction; exact for total degree <= 2n - 2.
TriangleRule collapsed_gauss_rule(int n);

/// Gauss-Legendre rule on [0, 1] (weights sum to one).
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};

LineRule gauss_legendre_unit(int n);

}  // namespace lce
