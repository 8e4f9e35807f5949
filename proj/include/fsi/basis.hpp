#pragma once

#include <array>

#include <Eigen/Dense>

#include "fsi/mesh.hpp"

namespace fsi {

/// Affine map of one triangle with constant barycentric gradients.
struct TriangleMap {
  std::array<Point2, 3> corners;
  double area = 0.0;
  std::array<Eigen::Vector2d, 3> grad_lambda;

  explicit TriangleMap(const std::array<Point2, 3>& c);

  Point2 map(const std::array<double, 3>& bary) const;
};

/// Scalar MINI velocity shapes on one cell: three hats and the cubic bubble
/// 27 l0 l1 l2 (index 3), which vanishes on every edge.
struct P1BubbleShapes {
  std::array<double, 4> value;
  std::array<Eigen::Vector2d, 4> grad;
};

P1BubbleShapes eval_p1_bubble(const TriangleMap& t, const std::array<double, 3>& bary);

inline double bubble(const std::array<double, 3>& l) { return 27.0 * l[0] * l[1] * l[2]; }

}  // namespace fsi
