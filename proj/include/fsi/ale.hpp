#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fsi/mesh.hpp"
#include "fsi/quadrature.hpp"

namespace fsi {

/// Geometric fields of the map (x1, x2) -> (x1, eta(x1) x2) at one point.
struct AlePoint {
  Eigen::Matrix2d F;     ///< [[1, 0], [x2 eta', eta]]
  Eigen::Matrix2d Finv;  ///< closed form, no numerical inversion
  Eigen::Matrix2d M;     ///< J F^{-T} = [[eta, -x2 eta'], [0, 1]]
  double J = 1.0;        ///< det F = eta
  double DtJ = 0.0;      ///< (eta_now - eta_prev) / tau
  Eigen::Vector2d w;     ///< mesh velocity (0, x2 DtJ)
  double eta_prev = 1.0; ///< previous height at the same point
};

/// Evaluates the ALE geometry from the current and previous interface
/// heights. Heights are P1 on the trace mesh and extended constantly in x2;
/// every cell lies in one grid column, so eta is affine on each cell.
class AleGeometry {
public:
  AleGeometry(const ReferenceMesh& mesh, Eigen::VectorXd eta_now, Eigen::VectorXd eta_prev,
              double tau);

  /// x must lie in (the closure of) `cell`.
  AlePoint at(int cell, const Point2& x) const;
  /// Geometry at each point of `quad` mapped into `cell`.
  std::vector<AlePoint> cell_points(int cell, const QuadratureRule& quad) const;

  double eta(int cell, double x1) const;
  double eta_prev(int cell, double x1) const;
  /// d eta / d x1 on the column of `cell`.
  double eta_slope(int cell) const;

  const ReferenceMesh& mesh() const { return *mesh_; }
  const Eigen::VectorXd& eta_now_nodes() const { return eta_now_; }
  const Eigen::VectorXd& eta_prev_nodes() const { return eta_prev_; }
  double tau() const { return tau_; }

private:
  double interp(const Eigen::VectorXd& nodes, int cell, double x1) const;

  const ReferenceMesh* mesh_;
  Eigen::VectorXd eta_now_;
  Eigen::VectorXd eta_prev_;
  double tau_;
};

/// Validates min eta_now > floor, naming the first violating node.
AleGeometry evaluate_geometry(const Eigen::VectorXd& eta_now, const Eigen::VectorXd& eta_prev,
                              double tau, const ReferenceMesh& mesh, double eta_floor = 1e-6);

/// Throws GeometryError if some nodal height is <= floor.
void check_height_floor(const Eigen::VectorXd& eta, double eta_floor);

/// w = (0, x2 DtJ) at each point of `quad` in `cell`.
std::vector<Eigen::Vector2d> mesh_velocity_field(const AleGeometry& geom, int cell,
                                                 const QuadratureRule& quad);

}  // namespace fsi
