#pragma once

#include <array>
#include <vector>

namespace fsi {

enum class LateralMode { periodic, clamped };

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Structured triangulation of [0,L] x [0,1]: an nx-by-ny grid of rectangles,
/// each split along its lower-left to upper-right diagonal.
///
/// Cell 2*s is the lower-right triangle (LL, LR, UR) of square s and cell
/// 2*s+1 the upper-left one (LL, UR, UL); square s sits at column s % nx and
/// row s / nx. Both are counter-clockwise.
///
/// In periodic mode the column x = L is identified with x = 0 at build time,
/// so vertex indices wrap and no constraint bookkeeping is needed later.
/// Vertex (i, j) has index j * columns() + i.
class ReferenceMesh {
public:
  ReferenceMesh(double length, int nx, int ny, LateralMode mode);

  double length() const { return length_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  LateralMode lateral_mode() const { return mode_; }
  bool periodic() const { return mode_ == LateralMode::periodic; }

  double dx() const { return length_ / nx_; }
  double dy() const { return 1.0 / ny_; }
  /// Characteristic size: the diameter of every cell.
  double h() const;

  /// Number of distinct vertex columns (nx when periodic, nx+1 when clamped).
  int columns() const { return periodic() ? nx_ : nx_ + 1; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }

  int vertex_index(int i, int j) const;
  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& cells() const { return cells_; }

  /// Unaliased corner coordinates of a cell (x may equal L on the seam).
  std::array<Point2, 3> cell_corners(int cell) const;
  /// Column of the grid a cell lies in; its x-range is [col*dx, (col+1)*dx].
  int cell_column(int cell) const { return (cell / 2) % nx_; }
  double cell_area() const { return 0.5 * dx() * dy(); }

  bool on_top(int vertex) const { return vertex / columns() == ny_; }
  bool on_bottom(int vertex) const { return vertex / columns() == 0; }
  bool on_lateral(int vertex) const;
  /// Dirichlet part of the boundary: everything except the top.
  bool on_dirichlet_boundary(int vertex) const;

private:
  double length_;
  int nx_;
  int ny_;
  LateralMode mode_;
  std::vector<Point2> vertices_;
  std::vector<std::array<int, 3>> cells_;
};

/// P1 trace mesh of the top boundary.
struct SurfaceMesh {
  double length = 0.0;
  LateralMode mode = LateralMode::periodic;
  std::vector<double> node_x;
  std::vector<std::array<int, 2>> segments;
  std::vector<int> parent_vertex;

  int num_nodes() const { return static_cast<int>(node_x.size()); }
  int num_segments() const { return static_cast<int>(segments.size()); }
  double segment_length() const { return length / num_segments(); }
  bool periodic() const { return mode == LateralMode::periodic; }
};

ReferenceMesh build_structured_mesh(double length, int nx, int ny, LateralMode mode);
/// Uniform halving in both directions; the coarse vertex (i, j) becomes (2i, 2j).
ReferenceMesh refine(const ReferenceMesh& mesh);
SurfaceMesh surface_trace(const ReferenceMesh& mesh);

}  // namespace fsi
