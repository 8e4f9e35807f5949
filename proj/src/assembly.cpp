#include "fsi/assembly.hpp"

#include <vector>

#include "fsi/basis.hpp"

namespace fsi {

int space_dimension(const ReferenceMesh& mesh, ScalarSpace space) {
  return space == ScalarSpace::p1 ? mesh.num_vertices() : mesh.num_vertices() + mesh.num_cells();
}

namespace {

int local_count(ScalarSpace s) { return s == ScalarSpace::p1 ? 3 : 4; }

int global_index(const ReferenceMesh& mesh, int cell, int a) {
  return a < 3 ? mesh.cells()[cell][a] : mesh.num_vertices() + cell;
}

}  // namespace

SparseMatrix assemble_bilinear(const ReferenceMesh& mesh, ScalarSpace trial, ScalarSpace test,
                               const BilinearKernel& kernel, const QuadratureRule& quad) {
  const int nt = local_count(trial);
  const int ns = local_count(test);
  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(mesh.num_cells()) * nt * ns);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const TriangleMap tri(mesh.cell_corners(c));
    Eigen::Matrix4d local = Eigen::Matrix4d::Zero();
    for (int q = 0; q < quad.size(); ++q) {
      const P1BubbleShapes s = eval_p1_bubble(tri, quad.points[q]);
      const double w = quad.weights[q] * 2.0 * tri.area;
      const QuadPointInfo info{c, tri.map(quad.points[q]), quad.points[q]};
      for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < nt; ++j) {
          local(i, j) += w * kernel({s.value[j], s.grad[j]}, {s.value[i], s.grad[i]}, info);
        }
      }
    }
    for (int i = 0; i < ns; ++i) {
      for (int j = 0; j < nt; ++j) {
        t.emplace_back(global_index(mesh, c, i), global_index(mesh, c, j), local(i, j));
      }
    }
  }
  SparseMatrix a(space_dimension(mesh, test), space_dimension(mesh, trial));
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

SparseMatrix assemble_surface_bilinear(const SurfaceMesh& surface, const SurfaceKernel& kernel,
                                       const LineRule& rule) {
  std::vector<Triplet> t;
  const double hs = surface.segment_length();
  for (int e = 0; e < surface.num_segments(); ++e) {
    const auto [n0, n1] = surface.segments[e];
    const double x0 = e * hs;
    for (int q = 0; q < rule.size(); ++q) {
      const double s = rule.points[q];
      const double w = rule.weights[q] * hs;
      const std::array<ShapeValue, 2> shapes{
          ShapeValue{1.0 - s, Eigen::Vector2d(-1.0 / hs, 0.0)},
          ShapeValue{s, Eigen::Vector2d(1.0 / hs, 0.0)}};
      const std::array<int, 2> nodes{n0, n1};
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          t.emplace_back(nodes[i], nodes[j], w * kernel(shapes[j], shapes[i], x0 + s * hs));
        }
      }
    }
  }
  SparseMatrix a(surface.num_nodes(), surface.num_nodes());
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

}  // namespace fsi
