#include "fsi/dofs.hpp"

namespace fsi {

FluidDofMap::FluidDofMap(const ReferenceMesh& mesh)
    : nv_(mesh.num_vertices()), nc_(mesh.num_cells()) {}

std::array<int, 11> FluidDofMap::cell_dofs(const ReferenceMesh& mesh, int cell) const {
  const auto& v = mesh.cells()[cell];
  std::array<int, 11> d{};
  for (int a = 0; a < 3; ++a) {
    d[2 * a] = vertex_velocity(v[a], 0);
    d[2 * a + 1] = vertex_velocity(v[a], 1);
    d[8 + a] = pressure(v[a]);
  }
  d[6] = bubble_velocity(cell, 0);
  d[7] = bubble_velocity(cell, 1);
  return d;
}

DofConstraints fluid_velocity_constraints(const ReferenceMesh& mesh, const FluidDofMap& dofs) {
  DofConstraints c(dofs.size());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.on_dirichlet_boundary(v)) {
      c.fix(dofs.vertex_velocity(v, 0));
      c.fix(dofs.vertex_velocity(v, 1));
    } else if (mesh.on_top(v)) {
      c.fix(dofs.vertex_velocity(v, 0));
    }
  }
  c.finalize();
  return c;
}

long long dof_count(const ReferenceMesh& mesh, DofProblem which) {
  const long long nv = mesh.num_vertices();
  const long long nc = mesh.num_cells();
  switch (which) {
    case DofProblem::fluid_step1:
      return 2 * nv + 2 * nc + nv;
    case DofProblem::structure_step2:
      return 2LL * mesh.columns();
  }
  return 0;
}

}  // namespace fsi
