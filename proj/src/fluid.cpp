#include "fsi/fluid.hpp"

#include <algorithm>
#include <cmath>

#include "fsi/errors.hpp"

namespace fsi {

FluidState FluidState::zero(const FluidDofMap& dofs) {
  return {Eigen::VectorXd::Zero(dofs.num_velocity()), Eigen::VectorXd::Zero(dofs.num_pressure())};
}

SurfaceField top_normal_trace(const SurfaceMesh& surface, const FluidDofMap& dofs,
                              const FluidState& u) {
  Eigen::VectorXd v(surface.num_nodes());
  for (int i = 0; i < surface.num_nodes(); ++i) {
    v[i] = u.velocity[dofs.vertex_velocity(surface.parent_vertex[i], 1)];
  }
  return {FieldKind::generic, std::move(v)};
}

VelocitySample sample_velocity(const Eigen::VectorXd& velocity, const FluidDofMap& dofs,
                               const std::array<int, 11>& d, const P1BubbleShapes& s) {
  (void)dofs;
  VelocitySample out{Eigen::Vector2d::Zero(), Eigen::Matrix2d::Zero()};
  for (int a = 0; a < 4; ++a) {
    for (int c = 0; c < 2; ++c) {
      const double coef = velocity[d[2 * a + c]];
      out.value[c] += coef * s.value[a];
      out.grad.row(c) += coef * s.grad[a].transpose();
    }
  }
  return out;
}

namespace {

int find_position(const SparseMatrix& a, int row, int col) {
  const auto* inner = a.innerIndexPtr();
  const auto begin = a.outerIndexPtr()[col];
  const auto end = a.outerIndexPtr()[col + 1];
  const auto* it = std::lower_bound(inner + begin, inner + end, row);
  if (it == inner + end || *it != row) return -1;
  return static_cast<int>(it - inner);
}

}  // namespace

FluidSolver::FluidSolver(const ReferenceMesh& mesh, const SurfaceOperators& surface,
                         FluidParams params, double tau, QuadratureRule quad,
                         SolverOptions options, TopCondition top)
    : mesh_(&mesh),
      surface_(&surface),
      params_(params),
      tau_(tau),
      quad_(std::move(quad)),
      top_(top),
      dofs_(mesh),
      solver_(options),
      fallback_solver_(options) {
  if (surface.num_nodes() != mesh.columns()) {
    throw ConfigError("fluid solver: surface operators do not match the mesh");
  }
  constraints_ = fluid_velocity_constraints(mesh, dofs_);
  if (top_ == TopCondition::strong) {
    for (int v : surface.surface().parent_vertex) constraints_.fix(dofs_.vertex_velocity(v, 1), 0.0);
    constraints_.finalize();
  }

  for (int type = 0; type < 2; ++type) {
    const TriangleMap tri(mesh.cell_corners(type));
    for (const auto& p : quad_.points) shapes_[type].push_back(eval_p1_bubble(tri, p));
  }
  cell_dofs_.resize(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) cell_dofs_[c] = dofs_.cell_dofs(mesh, c);

  full_ = build_layout(constraints_);
  DofConstraints no_bubbles = constraints_;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    no_bubbles.fix(dofs_.bubble_velocity(c, 0), 0.0);
    no_bubbles.fix(dofs_.bubble_velocity(c, 1), 0.0);
  }
  no_bubbles.finalize();
  condensed_ = build_layout(no_bubbles);
  work_ = condensed_.pattern;
  recovery_.resize(mesh.num_cells());
}

FluidSolver::Layout FluidSolver::build_layout(const DofConstraints& constraints) const {
  const int nc = mesh_->num_cells();
  Layout out;
  out.constraints = constraints;
  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(nc) * 121);
  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i < 11; ++i) {
      const int ri = constraints.reduced(cell_dofs_[c][i]);
      if (ri < 0) continue;
      for (int j = 0; j < 11; ++j) {
        const int rj = constraints.reduced(cell_dofs_[c][j]);
        if (rj >= 0) t.emplace_back(ri, rj, 0.0);
      }
    }
  }
  const int nf = constraints.num_free();
  out.pattern.resize(nf, nf);
  out.pattern.setFromTriplets(t.begin(), t.end());
  out.pattern.makeCompressed();

  out.positions.assign(static_cast<size_t>(nc) * 121, -1);
  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i < 11; ++i) {
      const int ri = constraints.reduced(cell_dofs_[c][i]);
      if (ri < 0) continue;
      for (int j = 0; j < 11; ++j) {
        const int rj = constraints.reduced(cell_dofs_[c][j]);
        if (rj >= 0) out.positions[static_cast<size_t>(c) * 121 + i * 11 + j] = find_position(out.pattern, ri, rj);
      }
    }
  }

  const auto& smesh = surface_->surface();
  out.top_dof.resize(smesh.num_nodes());
  for (int i = 0; i < smesh.num_nodes(); ++i) {
    out.top_dof[i] = constraints.reduced(dofs_.vertex_velocity(smesh.parent_vertex[i], 1));
  }
  const SparseMatrix& ms = surface_->mass();
  for (int col = 0; col < ms.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(ms, col); it; ++it) {
      const int ri = out.top_dof[it.row()];
      const int rj = out.top_dof[col];
      if (ri < 0 || rj < 0) continue;
      out.surface_positions.push_back(find_position(out.pattern, ri, rj));
      out.surface_mass.push_back(it.value());
    }
  }
  return out;
}

DofConstraints FluidSolver::constraints_for(const Step1Inputs& in, const DofConstraints& base) const {
  if (top_ != TopCondition::strong) return base;
  DofConstraints c = base;
  const auto& smesh = surface_->surface();
  for (int i = 0; i < smesh.num_nodes(); ++i) {
    if (mesh_->on_dirichlet_boundary(smesh.parent_vertex[i])) continue;
    c.fix(dofs_.vertex_velocity(smesh.parent_vertex[i], 1), in.xi_prev.values[i]);
  }
  return c;
}

void FluidSolver::local_system(const Step1Inputs& in, unsigned terms, int c, LocalMatrix& local,
                               LocalVector& local_rhs) const {
  const ReferenceMesh& mesh = *mesh_;
  const AleGeometry& geom = in.geom;
  const double rho_f = params_.rho_f;
  const double mu = params_.mu;
  const bool do_inertia = terms & term::inertia;
  const bool do_conv = terms & term::convection;
  const bool do_stress = terms & term::stress;
  const bool do_pressure = terms & term::pressure;

  std::array<Eigen::Vector2d, 4> phys_grad;
  std::array<Eigen::Vector2d, 4> cof_grad;
  std::array<double, 4> transport;

  const auto corners = mesh.cell_corners(c);
  const double wscale = 2.0 * mesh.cell_area();
  const auto& shapes = shapes_[c % 2];
  const auto& d = cell_dofs_[c];
  local.setZero();
  local_rhs.setZero();

  for (int q = 0; q < quad_.size(); ++q) {
    const auto& l = quad_.points[q];
    const P1BubbleShapes& s = shapes[q];
    const Point2 x{l[0] * corners[0].x + l[1] * corners[1].x + l[2] * corners[2].x,
                   l[0] * corners[0].y + l[1] * corners[1].y + l[2] * corners[2].y};
    const AlePoint g = geom.at(c, x);
    const double w = quad_.weights[q] * wscale;

    const VelocitySample up = sample_velocity(in.u_prev.velocity, dofs_, d, s);
    const Eigen::Vector2d beta = g.J * (g.Finv * (up.value - g.w));
    for (int a = 0; a < 4; ++a) {
      phys_grad[a] = g.Finv.transpose() * s.grad[a];
      cof_grad[a] = g.M * s.grad[a];
      transport[a] = s.grad[a].dot(beta);
    }

    const double mass_coef = do_inertia ? rho_f * (g.J / tau_ - 0.5 * g.DtJ) * w : 0.0;
    const double conv_coef = do_conv ? 0.5 * rho_f * w : 0.0;
    const double stress_coef = do_stress ? mu * g.J * w : 0.0;

    for (int ai = 0; ai < 4; ++ai) {
      for (int aj = 0; aj < 4; ++aj) {
        const double diag = mass_coef * s.value[ai] * s.value[aj] +
                            conv_coef * (s.value[ai] * transport[aj] - s.value[aj] * transport[ai]) +
                            stress_coef * phys_grad[aj].dot(phys_grad[ai]);
        for (int ci = 0; ci < 2; ++ci) {
          local(2 * ai + ci, 2 * aj + ci) += diag;
          if (do_stress) {
            for (int cj = 0; cj < 2; ++cj) {
              local(2 * ai + ci, 2 * aj + cj) += stress_coef * phys_grad[aj][ci] * phys_grad[ai][cj];
            }
          }
        }
      }
    }
    if (do_pressure) {
      for (int m = 0; m < 3; ++m) {
        for (int a = 0; a < 4; ++a) {
          for (int comp = 0; comp < 2; ++comp) {
            const double b = -w * l[m] * cof_grad[a][comp];
            local(2 * a + comp, 8 + m) += b;
            local(8 + m, 2 * a + comp) += b;
          }
        }
      }
    }
    if (do_inertia) {
      const double rc = rho_f * (g.J / tau_ - g.DtJ) * w;
      for (int a = 0; a < 4; ++a) {
        for (int comp = 0; comp < 2; ++comp) local_rhs(2 * a + comp) += rc * up.value[comp] * s.value[a];
      }
    }
  }
}

void FluidSolver::assemble_into(const Step1Inputs& in, unsigned terms, const Layout& layout,
                                const DofConstraints& constraints, SparseMatrix& matrix,
                                Eigen::VectorXd& rhs,
                                std::vector<BubbleRecovery>* recovery) const {
  double* values = matrix.valuePtr();
  std::fill(values, values + matrix.nonZeros(), 0.0);
  rhs.setZero(constraints.num_free());

  LocalMatrix local;
  LocalVector local_rhs;
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const auto& d = cell_dofs_[c];
    local_system(in, terms, c, local, local_rhs);

    for (int j = 0; j < 11; ++j) {
      const bool bubble = j == 6 || j == 7;
      if ((recovery && bubble) || !constraints.is_fixed(d[j])) continue;
      const double gval = constraints.value(d[j]);
      if (gval != 0.0) local_rhs -= local.col(j) * gval;
      local.col(j).setZero();
    }
    if (recovery) {
      BubbleRecovery& r = (*recovery)[c];
      r.inverse = local.block<2, 2>(6, 6).inverse();
      r.coupling = local.middleRows<2>(6);
      r.coupling.middleCols<2>(6).setZero();
      r.rhs = local_rhs.segment<2>(6);
      const Eigen::Matrix<double, 11, 2> lcb = local.middleCols<2>(6) * r.inverse;
      local.noalias() -= lcb * r.coupling;
      local_rhs.noalias() -= lcb * r.rhs;
    }

    const int* pos = &layout.positions[static_cast<size_t>(c) * 121];
    for (int i = 0; i < 11; ++i) {
      const int ri = constraints.reduced(d[i]);
      if (ri < 0) continue;
      rhs[ri] += local_rhs(i);
      for (int j = 0; j < 11; ++j) {
        const int p = pos[i * 11 + j];
        if (p >= 0) values[p] += local(i, j);
      }
    }
  }

  if ((terms & term::interface) && top_ == TopCondition::penalty) {
    const double pen = params_.rho_s / tau_;
    for (size_t e = 0; e < layout.surface_positions.size(); ++e) {
      values[layout.surface_positions[e]] += pen * layout.surface_mass[e];
    }
    const SurfaceOperators& ops = *surface_;
    Eigen::VectorXd top_rhs = pen * (ops.mass() * in.xi_prev.values) -
                              ops.stiffness() * (params_.gamma1 * in.eta_k.values +
                                                 params_.gamma2 * in.zeta_k.values);
    if (in.surface_load) top_rhs += *in.surface_load;
    for (int i = 0; i < ops.num_nodes(); ++i) {
      if (layout.top_dof[i] >= 0) rhs[layout.top_dof[i]] += top_rhs[i];
    }
  }
}

SparseSystem FluidSolver::assemble(const Step1Inputs& in, unsigned terms) const {
  SparseSystem sys;
  sys.constraints = constraints_for(in, full_.constraints);
  sys.matrix = full_.pattern;
  assemble_into(in, terms, full_, sys.constraints, sys.matrix, sys.rhs, nullptr);
  return sys;
}

Eigen::VectorXd FluidSolver::solve_with_multiplier(const SparseMatrix& a, const Eigen::VectorXd& b,
                                                   const DofConstraints& constraints) {
  const int n = static_cast<int>(a.rows());
  // int p dx over the reduced pressure dofs
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  const ReferenceMesh& mesh = *mesh_;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int m = 0; m < 3; ++m) {
      const int r = constraints.reduced(dofs_.pressure(mesh.cells()[c][m]));
      if (r >= 0) mean[r] += mesh.cell_area() / 3.0;
    }
  }
  std::vector<Triplet> t;
  t.reserve(a.nonZeros() + 2 * mesh.num_vertices());
  for (int col = 0; col < a.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) t.emplace_back(it.row(), col, it.value());
  }
  for (int i = 0; i < n; ++i) {
    if (mean[i] != 0.0) {
      t.emplace_back(i, n, mean[i]);
      t.emplace_back(n, i, mean[i]);
    }
  }
  SparseMatrix aug(n + 1, n + 1);
  aug.setFromTriplets(t.begin(), t.end());
  aug.makeCompressed();
  Eigen::VectorXd rhs(n + 1);
  rhs << b, 0.0;
  const Eigen::VectorXd x = fallback_solver_.solve(aug, rhs);
  return x.head(n);
}

FluidState FluidSolver::solve(const Step1Inputs& in) {
  const DofConstraints constraints = constraints_for(in, condensed_.constraints);
  Eigen::VectorXd b;
  assemble_into(in, term::all, condensed_, constraints, work_, b, &recovery_);

  Eigen::VectorXd x;
  if (!use_multiplier_ && top_ == TopCondition::strong) {
    // every boundary velocity is prescribed: the pressure constant is free
    use_multiplier_ = true;
    warnings_.push_back("closed domain: pressure fixed by a pressure-mean multiplier");
  }
  if (!use_multiplier_) {
    try {
      x = solver_.solve(work_, b);
    } catch (const SolverError& e) {
      use_multiplier_ = true;
      warnings_.push_back(std::string("fluid system singular (") + e.what() +
                          "); retrying with a pressure-mean multiplier");
    }
  }
  if (use_multiplier_) x = solve_with_multiplier(work_, b, constraints);

  Eigen::VectorXd full = constraints.expand(x);
  Eigen::Matrix<double, 11, 1> xl;
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const auto& d = cell_dofs_[c];
    for (int j = 0; j < 11; ++j) xl[j] = full[d[j]];
    const BubbleRecovery& r = recovery_[c];
    const Eigen::Vector2d ub = r.inverse * (r.rhs - r.coupling * xl);
    full[d[6]] = ub[0];
    full[d[7]] = ub[1];
  }
  FluidState out;
  out.velocity = full.head(dofs_.num_velocity());
  out.pressure = full.tail(dofs_.num_pressure());
  return out;
}

double divergence_residual(const FluidState& u, const AleGeometry& geom, const FluidDofMap& dofs,
                           const QuadratureRule& quad) {
  const ReferenceMesh& mesh = geom.mesh();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const TriangleMap tri(mesh.cell_corners(c));
    const auto d = dofs.cell_dofs(mesh, c);
    for (int q = 0; q < quad.size(); ++q) {
      const P1BubbleShapes s = eval_p1_bubble(tri, quad.points[q]);
      const AlePoint g = geom.at(c, tri.map(quad.points[q]));
      const VelocitySample us = sample_velocity(u.velocity, dofs, d, s);
      const double div = (us.grad.array() * g.M.array()).sum();
      const double w = quad.weights[q] * 2.0 * tri.area;
      for (int m = 0; m < 3; ++m) r[mesh.cells()[c][m]] += w * quad.points[q][m] * div;
    }
  }
  return r.cwiseAbs().maxCoeff();
}

}  // namespace fsi
