#pragma once

#include <array>
#include <vector>

namespace fsi {

/// Quadrature on the reference triangle {(0,0), (1,0), (0,1)}.
/// Points are barycentric (l0, l1, l2) with x = l1, y = l2; weights sum to 1/2.
struct QuadratureRule {
  int degree = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }
};

/// Quadrature on [0, 1]; weights sum to 1.
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }
};

/// Symmetric rule with positive weights, exact for total degree <= `degree`.
/// Supported degrees: 1..8. Degrees 3 and 7 return the next rule up.
QuadratureRule quad_rule_triangle(int degree);

/// n-point Gauss-Legendre rule mapped to [0, 1] (exact to degree 2n-1).
LineRule gauss_legendre(int n);

}  // namespace fsi
