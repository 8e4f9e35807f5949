#include "fsi/ale.hpp"

#include <sstream>

#include "fsi/basis.hpp"
#include "fsi/errors.hpp"

namespace fsi {

AleGeometry::AleGeometry(const ReferenceMesh& mesh, Eigen::VectorXd eta_now,
                         Eigen::VectorXd eta_prev, double tau)
    : mesh_(&mesh), eta_now_(std::move(eta_now)), eta_prev_(std::move(eta_prev)), tau_(tau) {}

double AleGeometry::interp(const Eigen::VectorXd& nodes, int cell, double x1) const {
  const int col = mesh_->cell_column(cell);
  const int right = mesh_->periodic() ? (col + 1) % mesh_->nx() : col + 1;
  const double s = (x1 - col * mesh_->dx()) / mesh_->dx();
  return (1.0 - s) * nodes[col] + s * nodes[right];
}

double AleGeometry::eta(int cell, double x1) const { return interp(eta_now_, cell, x1); }
double AleGeometry::eta_prev(int cell, double x1) const { return interp(eta_prev_, cell, x1); }

double AleGeometry::eta_slope(int cell) const {
  const int col = mesh_->cell_column(cell);
  const int right = mesh_->periodic() ? (col + 1) % mesh_->nx() : col + 1;
  return (eta_now_[right] - eta_now_[col]) / mesh_->dx();
}

AlePoint AleGeometry::at(int cell, const Point2& x) const {
  const double e = eta(cell, x.x);
  const double ep = eta_prev(cell, x.x);
  const double slope = eta_slope(cell);
  const double y = x.y;
  AlePoint g;
  g.J = e;
  g.eta_prev = ep;
  g.F << 1.0, 0.0, y * slope, e;
  g.Finv << 1.0, 0.0, -y * slope / e, 1.0 / e;
  g.M << e, -y * slope, 0.0, 1.0;
  g.DtJ = (e - ep) / tau_;
  g.w = Eigen::Vector2d(0.0, y * g.DtJ);
  return g;
}

std::vector<AlePoint> AleGeometry::cell_points(int cell, const QuadratureRule& quad) const {
  const TriangleMap tri(mesh_->cell_corners(cell));
  std::vector<AlePoint> out;
  out.reserve(quad.size());
  for (const auto& p : quad.points) out.push_back(at(cell, tri.map(p)));
  return out;
}

void check_height_floor(const Eigen::VectorXd& eta, double eta_floor) {
  for (int i = 0; i < eta.size(); ++i) {
    if (!(eta[i] > eta_floor)) {
      std::ostringstream msg;
      msg << "interface height " << eta[i] << " at surface node " << i
          << " is not above the floor " << eta_floor;
      throw GeometryError(msg.str(), i, eta[i]);
    }
  }
}

AleGeometry evaluate_geometry(const Eigen::VectorXd& eta_now, const Eigen::VectorXd& eta_prev,
                              double tau, const ReferenceMesh& mesh, double eta_floor) {
  if (eta_now.size() != mesh.columns() || eta_prev.size() != mesh.columns()) {
    throw ConfigError("geometry: height fields do not match the surface trace");
  }
  check_height_floor(eta_now, eta_floor);
  return AleGeometry(mesh, eta_now, eta_prev, tau);
}

std::vector<Eigen::Vector2d> mesh_velocity_field(const AleGeometry& geom, int cell,
                                                 const QuadratureRule& quad) {
  std::vector<Eigen::Vector2d> w;
  for (const auto& g : geom.cell_points(cell, quad)) w.push_back(g.w);
  return w;
}

}  // namespace fsi
