#pragma once

#include <functional>

#include <Eigen/Dense>

#include "fsi/mesh.hpp"
#include "fsi/quadrature.hpp"
#include "fsi/sparse.hpp"

namespace fsi {

/// Scalar finite element spaces on the reference mesh.
enum class ScalarSpace {
  p1,         ///< one dof per vertex
  p1_bubble,  ///< vertex dofs first, then one bubble dof per cell
};

int space_dimension(const ReferenceMesh& mesh, ScalarSpace space);

struct ShapeValue {
  double value = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
};

struct QuadPointInfo {
  int cell = 0;
  Point2 x;
  std::array<double, 3> bary{};
};

using BilinearKernel =
    std::function<double(const ShapeValue& trial, const ShapeValue& test, const QuadPointInfo& qp)>;

/// Sum over cells and quadrature points of weight * kernel(trial_j, test_i).
/// Row index is the test dof, column index the trial dof.
SparseMatrix assemble_bilinear(const ReferenceMesh& mesh, ScalarSpace trial, ScalarSpace test,
                               const BilinearKernel& kernel, const QuadratureRule& quad);

using SurfaceKernel = std::function<double(const ShapeValue& trial, const ShapeValue& test, double x)>;

/// Same on the interface trace with a Gauss rule per segment.
SparseMatrix assemble_surface_bilinear(const SurfaceMesh& surface, const SurfaceKernel& kernel,
                                       const LineRule& rule);

}  // namespace fsi
