#include "fsi/basis.hpp"

namespace fsi {

TriangleMap::TriangleMap(const std::array<Point2, 3>& c) : corners(c) {
  const double x1 = c[1].x - c[0].x, y1 = c[1].y - c[0].y;
  const double x2 = c[2].x - c[0].x, y2 = c[2].y - c[0].y;
  const double det = x1 * y2 - x2 * y1;
  area = 0.5 * det;
  // Rows of the inverse Jacobian give grad l1 and grad l2.
  grad_lambda[1] = Eigen::Vector2d(y2, -x2) / det;
  grad_lambda[2] = Eigen::Vector2d(-y1, x1) / det;
  grad_lambda[0] = -grad_lambda[1] - grad_lambda[2];
}

Point2 TriangleMap::map(const std::array<double, 3>& l) const {
  return {l[0] * corners[0].x + l[1] * corners[1].x + l[2] * corners[2].x,
          l[0] * corners[0].y + l[1] * corners[1].y + l[2] * corners[2].y};
}

P1BubbleShapes eval_p1_bubble(const TriangleMap& t, const std::array<double, 3>& l) {
  P1BubbleShapes s;
  for (int a = 0; a < 3; ++a) {
    s.value[a] = l[a];
    s.grad[a] = t.grad_lambda[a];
  }
  s.value[3] = bubble(l);
  s.grad[3] = 27.0 * (l[1] * l[2] * t.grad_lambda[0] + l[0] * l[2] * t.grad_lambda[1] +
                      l[0] * l[1] * t.grad_lambda[2]);
  return s;
}

}  // namespace fsi
