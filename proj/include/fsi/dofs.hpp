#pragma once

#include <array>

#include "fsi/mesh.hpp"
#include "fsi/sparse.hpp"

namespace fsi {

/// Global numbering for the MINI velocity / P1 pressure pair:
///   [vertex velocity (2 per vertex, interleaved) | bubbles (2 per cell) | pressure (1 per vertex)]
class FluidDofMap {
public:
  explicit FluidDofMap(const ReferenceMesh& mesh);

  int num_vertices() const { return nv_; }
  int num_cells() const { return nc_; }
  int num_velocity() const { return 2 * nv_ + 2 * nc_; }
  int num_pressure() const { return nv_; }
  int size() const { return num_velocity() + num_pressure(); }

  int vertex_velocity(int vertex, int comp) const { return 2 * vertex + comp; }
  int bubble_velocity(int cell, int comp) const { return 2 * nv_ + 2 * cell + comp; }
  int pressure(int vertex) const { return num_velocity() + vertex; }

  /// Local order: (shape a, component c) -> 2a + c for a = 0..3 (3 = bubble),
  /// then the three vertex pressures at 8, 9, 10.
  std::array<int, 11> cell_dofs(const ReferenceMesh& mesh, int cell) const;

private:
  int nv_;
  int nc_;
};

/// Homogeneous velocity constraints: both components on the Dirichlet
/// boundary, the horizontal component on the top.
DofConstraints fluid_velocity_constraints(const ReferenceMesh& mesh, const FluidDofMap& dofs);

enum class DofProblem { fluid_step1, structure_step2 };

/// Unknown counts before constraint elimination.
long long dof_count(const ReferenceMesh& mesh, DofProblem which);

}  // namespace fsi
