#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "fsi/ale.hpp"
#include "fsi/errors.hpp"
#include "fsi/fluid.hpp"
#include "fsi/mesh.hpp"
#include "fsi/quadrature.hpp"
#include "fsi/structure.hpp"

using namespace fsi;

namespace {

struct Rig {
  ReferenceMesh mesh;
  SurfaceOperators ops;
  FluidParams params;
  double tau;
  FluidSolver solver;

  Rig(int nx, int ny, LateralMode mode, double tau_ = 0.01, TopCondition top = TopCondition::penalty)
      : mesh(build_structured_mesh(2.0, nx, ny, mode)),
        ops(surface_trace(mesh)),
        params(),
        tau(tau_),
        solver(mesh, ops, params, tau, quad_rule_triangle(6), {}, top) {}

  int nodes() const { return ops.num_nodes(); }
};

Eigen::VectorXd random_vector(int n, std::mt19937& rng, double scale = 1.0) {
  std::normal_distribution<double> n01;
  Eigen::VectorXd v(n);
  for (auto& x : v) x = scale * n01(rng);
  return v;
}

// dense reduced block with rows and columns restricted to velocity dofs
Eigen::MatrixXd velocity_block(const SparseSystem& sys, const FluidDofMap& dofs) {
  std::vector<int> rows;
  for (int d = 0; d < dofs.num_velocity(); ++d) {
    if (!sys.constraints.is_fixed(d)) rows.push_back(sys.constraints.reduced(d));
  }
  const Eigen::MatrixXd full(sys.matrix);
  Eigen::MatrixXd out(rows.size(), rows.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows.size(); ++j) out(i, j) = full(rows[i], rows[j]);
  return out;
}

// flat-domain viscous and pressure blocks from barycentric gradients and a
// degree-8 rule, independent of the ALE code path
SparseMatrix flat_oracle(const ReferenceMesh& m, const FluidDofMap& dofs, double mu, bool with_pressure) {
  const auto quad = quad_rule_triangle(8);
  std::vector<Triplet> t;
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto p = m.cell_corners(c);
    Eigen::Matrix2d jac;
    jac << p[1].x - p[0].x, p[2].x - p[0].x, p[1].y - p[0].y, p[2].y - p[0].y;
    const Eigen::Matrix2d jit = jac.inverse().transpose();
    const double area = 0.5 * std::abs(jac.determinant());
    const std::array<Eigen::Vector2d, 3> gl{jit * Eigen::Vector2d(-1, -1), jit * Eigen::Vector2d(1, 0),
                                            jit * Eigen::Vector2d(0, 1)};
    const auto d = dofs.cell_dofs(m, c);
    for (int q = 0; q < quad.size(); ++q) {
      const auto& l = quad.points[q];
      const double w = quad.weights[q] * 2 * area;
      std::array<Eigen::Vector2d, 4> g{gl[0], gl[1], gl[2],
                                       27 * (l[1] * l[2] * gl[0] + l[0] * l[2] * gl[1] + l[0] * l[1] * gl[2])};
      for (int a = 0; a < 4; ++a)
        for (int ca = 0; ca < 2; ++ca)
          for (int b = 0; b < 4; ++b)
            for (int cb = 0; cb < 2; ++cb) {
              // 2 mu eps(phi_b e_cb) : eps(phi_a e_ca)
              Eigen::Matrix2d ga = Eigen::Matrix2d::Zero(), gb = Eigen::Matrix2d::Zero();
              ga.row(ca) = g[a].transpose();
              gb.row(cb) = g[b].transpose();
              const Eigen::Matrix2d ea = 0.5 * (ga + ga.transpose()), eb = 0.5 * (gb + gb.transpose());
              const double v = 2 * mu * (ea.array() * eb.array()).sum() * w;
              if (v != 0.0) t.emplace_back(d[2 * a + ca], d[2 * b + cb], v);
            }
      if (with_pressure) {
        for (int mm = 0; mm < 3; ++mm)
          for (int a = 0; a < 4; ++a)
            for (int ca = 0; ca < 2; ++ca) {
              const double v = -w * l[mm] * g[a][ca];
              t.emplace_back(d[2 * a + ca], d[8 + mm], v);
              t.emplace_back(d[8 + mm], d[2 * a + ca], v);
            }
      }
    }
  }
  SparseMatrix a(dofs.size(), dofs.size());
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

}  // namespace

TEST_CASE("rest state is a fixed point") {
  for (auto mode : {LateralMode::periodic, LateralMode::clamped}) {
    Rig r(10, 5, mode);
    const int n = r.nodes();
    const auto u0 = FluidState::zero(r.solver.dofs());
    const SurfaceField xi{FieldKind::xi, Eigen::VectorXd::Zero(n)};
    const SurfaceField eta{FieldKind::eta, Eigen::VectorXd::Ones(n)};
    const SurfaceField zeta{FieldKind::zeta, Eigen::VectorXd::Zero(n)};
    const auto geom = evaluate_geometry(eta.values, eta.values, r.tau, r.mesh);
    const Step1Inputs in{u0, xi, geom, eta, zeta};
    const auto sys = r.solver.assemble(in);
    CHECK(sys.rhs.cwiseAbs().maxCoeff() == 0.0);
    CHECK(find_empty_line(sys.matrix) == -1);
    const auto s = r.solver.solve(in);
    CHECK(s.velocity.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.pressure.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.solver.last_residual() <= 1e-12);
  }
}

TEST_CASE("flat stokes blocks agree with an independent assembly") {
  Rig r(6, 3, LateralMode::periodic);
  const int n = r.nodes();
  const auto u0 = FluidState::zero(r.solver.dofs());
  const SurfaceField xi{FieldKind::xi, Eigen::VectorXd::Zero(n)};
  const SurfaceField eta{FieldKind::eta, Eigen::VectorXd::Ones(n)};
  const SurfaceField zeta{FieldKind::zeta, Eigen::VectorXd::Zero(n)};
  const auto geom = evaluate_geometry(eta.values, eta.values, r.tau, r.mesh);
  const Step1Inputs in{u0, xi, geom, eta, zeta};

  const auto got = r.solver.assemble(in, term::stress | term::pressure);
  const auto oracle = eliminate_constraints(flat_oracle(r.mesh, r.solver.dofs(), r.params.mu, true),
                                            Eigen::VectorXd::Zero(r.solver.dofs().size()), got.constraints);
  const Eigen::MatrixXd diff = Eigen::MatrixXd(got.matrix) - Eigen::MatrixXd(oracle.matrix);
  CHECK(diff.cwiseAbs().maxCoeff() < 1e-13);

  // frozen flat inertia is a scaled mass matrix of nonnegative shapes
  const auto inertia = r.solver.assemble(in, term::inertia);
  const Eigen::MatrixXd im(inertia.matrix);
  CHECK((im - im.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(im.minCoeff() >= 0.0);
}

TEST_CASE("convection is skew-symmetric for random frozen fields") {
  Rig r(8, 4, LateralMode::periodic);
  const int n = r.nodes();
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    FluidState u = FluidState::zero(r.solver.dofs());
    u.velocity = random_vector(r.solver.dofs().num_velocity(), rng);
    const SurfaceField eta{FieldKind::eta, (1.0 + 0.1 * random_vector(n, rng).array()).matrix()};
    const SurfaceField eta_prev{FieldKind::eta, (1.0 + 0.1 * random_vector(n, rng).array()).matrix()};
    const SurfaceField xi{FieldKind::xi, Eigen::VectorXd::Zero(n)};
    const SurfaceField zeta{FieldKind::zeta, Eigen::VectorXd::Zero(n)};
    const auto geom = evaluate_geometry(eta.values, eta_prev.values, r.tau, r.mesh);
    const Step1Inputs in{u, xi, geom, eta, zeta};
    const Eigen::MatrixXd c = velocity_block(r.solver.assemble(in, term::convection), r.solver.dofs());
    const double scale = c.cwiseAbs().maxCoeff();
    CHECK(scale > 0.0);
    CHECK((c + c.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * scale);
  }
}

TEST_CASE("divergence residual") {
  Rig r(10, 5, LateralMode::periodic);
  const int n = r.nodes();
  std::mt19937 rng(5);
  const Eigen::VectorXd e = (1.0 + 0.05 * random_vector(n, rng).array()).matrix();
  const auto geom = evaluate_geometry(e, Eigen::VectorXd::Ones(n), r.tau, r.mesh);
  const auto& dofs = r.solver.dofs();
  const auto quad = quad_rule_triangle(6);

  FluidState u = FluidState::zero(dofs);
  CHECK(divergence_residual(u, geom, dofs, quad) == 0.0);
  for (int v = 0; v < dofs.num_vertices(); ++v) {
    u.velocity[dofs.vertex_velocity(v, 0)] = 0.7;
    u.velocity[dofs.vertex_velocity(v, 1)] = -1.3;
  }
  CHECK(divergence_residual(u, geom, dofs, quad) < 1e-14);
}

TEST_CASE("solve with moving data satisfies the discrete divergence constraint") {
  Rig r(10, 5, LateralMode::periodic);
  const int n = r.nodes();
  std::mt19937 rng(9);
  const auto& dofs = r.solver.dofs();
  FluidState u = FluidState::zero(dofs);
  u.velocity = 0.1 * random_vector(dofs.num_velocity(), rng);
  for (int d = 0; d < dofs.num_velocity(); ++d) {
    if (r.solver.constraints().is_fixed(d)) u.velocity[d] = 0.0;
  }
  Eigen::VectorXd eta_prev(n), eta(n);
  for (int i = 0; i < n; ++i) {
    const double x = r.ops.surface().node_x[i];
    eta_prev[i] = 1.0 + 0.05 * std::cos(M_PI * x);
    eta[i] = eta_prev[i] + r.tau * 0.2 * std::sin(M_PI * x);
  }
  const SurfaceField xi{FieldKind::xi, (eta - eta_prev) / r.tau};
  const SurfaceField etaf{FieldKind::eta, eta};
  const SurfaceField zeta = discrete_laplace(r.ops, etaf);
  const Eigen::VectorXd load = r.ops.load_vector([](double x) { return 5 * std::sin(M_PI * x); });
  const auto geom = evaluate_geometry(eta, eta_prev, r.tau, r.mesh);
  const Step1Inputs in{u, xi, geom, etaf, zeta, &load};
  const auto s = r.solver.solve(in);
  CHECK(r.solver.last_residual() <= 1e-12);
  CHECK(divergence_residual(s, geom, dofs, r.solver.quadrature()) <= 1e-10 * s.velocity.norm());

  // the condensed solve reproduces the full saddle point solution
  const auto sys = r.solver.assemble(in);
  const Eigen::VectorXd full = solve_sparse(sys);
  Eigen::VectorXd got(dofs.size());
  got << s.velocity, s.pressure;
  CHECK((full - got).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + full.cwiseAbs().maxCoeff()));
}

TEST_CASE("strong interface condition reproduces the prescribed vertical velocity") {
  Rig r(10, 5, LateralMode::periodic, 0.01, TopCondition::strong);
  const int n = r.nodes();
  const auto& dofs = r.solver.dofs();
  Eigen::VectorXd xi(n);
  for (int i = 0; i < n; ++i) xi[i] = 0.3 * std::sin(M_PI * r.ops.surface().node_x[i]);
  const SurfaceField xif{FieldKind::xi, xi};
  const SurfaceField eta{FieldKind::eta, Eigen::VectorXd::Ones(n)};
  const SurfaceField zeta{FieldKind::zeta, Eigen::VectorXd::Zero(n)};
  const auto geom = evaluate_geometry(eta.values, eta.values, r.tau, r.mesh);
  const auto u0 = FluidState::zero(dofs);
  const auto s = r.solver.solve({u0, xif, geom, eta, zeta});
  const auto top = top_normal_trace(r.ops.surface(), dofs, s);
  CHECK((top.values - xi).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(divergence_residual(s, geom, dofs, r.solver.quadrature()) <= 1e-10 * s.velocity.norm());
}

TEST_CASE("closed cavity falls back to a pressure multiplier") {
  Rig r(6, 3, LateralMode::clamped, 0.01, TopCondition::strong);
  const int n = r.nodes();
  const auto& dofs = r.solver.dofs();
  const SurfaceField xi{FieldKind::xi, Eigen::VectorXd::Zero(n)};
  const SurfaceField eta{FieldKind::eta, Eigen::VectorXd::Ones(n)};
  const SurfaceField zeta{FieldKind::zeta, Eigen::VectorXd::Zero(n)};
  const auto geom = evaluate_geometry(eta.values, eta.values, r.tau, r.mesh);
  FluidState u0 = FluidState::zero(dofs);
  // interior swirl as previous velocity
  for (int v = 0; v < dofs.num_vertices(); ++v) {
    const Point2 p = r.mesh.vertices()[v];
    if (r.mesh.on_dirichlet_boundary(v) || r.mesh.on_top(v)) continue;
    u0.velocity[dofs.vertex_velocity(v, 0)] = p.y - 0.5;
    u0.velocity[dofs.vertex_velocity(v, 1)] = 1.0 - p.x;
  }
  const auto s = r.solver.solve({u0, xi, geom, eta, zeta});
  CHECK(r.solver.using_pressure_multiplier());
  CHECK_FALSE(r.solver.warnings().empty());
  CHECK(std::isfinite(s.pressure.norm()));
  CHECK(s.velocity.norm() > 0.0);
}

TEST_CASE("sampled velocity reproduces linear fields") {
  const auto m = build_structured_mesh(2.0, 4, 2, LateralMode::clamped);
  const FluidDofMap dofs(m);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dofs.num_velocity());
  for (int i = 0; i < dofs.num_vertices(); ++i) {
    const Point2 p = m.vertices()[i];
    v[dofs.vertex_velocity(i, 0)] = 1 + 2 * p.x - p.y;
    v[dofs.vertex_velocity(i, 1)] = 3 * p.y;
  }
  for (int c = 0; c < m.num_cells(); ++c) {
    const TriangleMap t(m.cell_corners(c));
    const std::array<double, 3> l{0.2, 0.3, 0.5};
    const auto s = sample_velocity(v, dofs, dofs.cell_dofs(m, c), eval_p1_bubble(t, l));
    const Point2 x = t.map(l);
    CHECK(s.value[0] == doctest::Approx(1 + 2 * x.x - x.y));
    CHECK(s.value[1] == doctest::Approx(3 * x.y));
    CHECK(s.grad(0, 0) == doctest::Approx(2.0));
    CHECK(s.grad(0, 1) == doctest::Approx(-1.0));
    CHECK(s.grad(1, 1) == doctest::Approx(3.0));
  }
}
