#include "fsi/mesh.hpp"

#include <cmath>
#include <string>

#include "fsi/errors.hpp"

namespace fsi {

ReferenceMesh::ReferenceMesh(double length, int nx, int ny, LateralMode mode)
    : length_(length), nx_(nx), ny_(ny), mode_(mode) {
  if (!(length > 0.0)) throw ConfigError("mesh length must be positive");
  if (nx < 2) throw ConfigError("mesh nx must be >= 2, got " + std::to_string(nx));
  if (ny < 1) throw ConfigError("mesh ny must be >= 1, got " + std::to_string(ny));

  const int cols = columns();
  vertices_.reserve(static_cast<size_t>(cols) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i < cols; ++i) {
      vertices_.push_back({i * dx(), j * dy()});
    }
  }

  cells_.reserve(2 * static_cast<size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int ll = vertex_index(i, j);
      const int lr = vertex_index(i + 1, j);
      const int ur = vertex_index(i + 1, j + 1);
      const int ul = vertex_index(i, j + 1);
      cells_.push_back({ll, lr, ur});
      cells_.push_back({ll, ur, ul});
    }
  }
}

double ReferenceMesh::h() const { return std::hypot(dx(), dy()); }

int ReferenceMesh::vertex_index(int i, int j) const {
  if (periodic()) i = ((i % nx_) + nx_) % nx_;
  return j * columns() + i;
}

std::array<Point2, 3> ReferenceMesh::cell_corners(int cell) const {
  const int square = cell / 2;
  const int i = square % nx_;
  const int j = square / nx_;
  const Point2 ll{i * dx(), j * dy()};
  const Point2 lr{(i + 1) * dx(), j * dy()};
  const Point2 ur{(i + 1) * dx(), (j + 1) * dy()};
  const Point2 ul{i * dx(), (j + 1) * dy()};
  if (cell % 2 == 0) return {ll, lr, ur};
  return {ll, ur, ul};
}

bool ReferenceMesh::on_lateral(int vertex) const {
  if (periodic()) return false;
  const int i = vertex % columns();
  return i == 0 || i == nx_;
}

bool ReferenceMesh::on_dirichlet_boundary(int vertex) const {
  return on_bottom(vertex) || on_lateral(vertex);
}

ReferenceMesh build_structured_mesh(double length, int nx, int ny, LateralMode mode) {
  return ReferenceMesh(length, nx, ny, mode);
}

ReferenceMesh refine(const ReferenceMesh& mesh) {
  return ReferenceMesh(mesh.length(), 2 * mesh.nx(), 2 * mesh.ny(), mesh.lateral_mode());
}

SurfaceMesh surface_trace(const ReferenceMesh& mesh) {
  SurfaceMesh s;
  s.length = mesh.length();
  s.mode = mesh.lateral_mode();
  const int n = mesh.columns();
  const int top = mesh.ny();
  for (int i = 0; i < n; ++i) {
    const int v = mesh.vertex_index(i, top);
    s.parent_vertex.push_back(v);
    // Same expression as the volume vertex, so the coordinates agree bit for bit.
    s.node_x.push_back(mesh.vertices()[v].x);
  }
  for (int i = 0; i < mesh.nx(); ++i) {
    s.segments.push_back({i, mesh.periodic() ? (i + 1) % n : i + 1});
  }
  return s;
}

}  // namespace fsi
