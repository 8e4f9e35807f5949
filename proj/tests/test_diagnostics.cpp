#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "fsi/ale.hpp"
#include "fsi/diagnostics.hpp"
#include "fsi/errors.hpp"
#include "fsi/fluid.hpp"
#include "fsi/mesh.hpp"
#include "fsi/quadrature.hpp"
#include "fsi/structure.hpp"

using namespace fsi;

namespace {

Eigen::VectorXd random_vector(int n, std::mt19937& rng) {
  std::normal_distribution<double> n01;
  Eigen::VectorXd v(n);
  for (auto& x : v) x = n01(rng);
  return v;
}

// periodic P1 matrices written out by hand
struct Dense {
  Eigen::MatrixXd m, k;
  Dense(int n, double h) : m(Eigen::MatrixXd::Zero(n, n)), k(Eigen::MatrixXd::Zero(n, n)) {
    for (int i = 0; i < n; ++i) {
      const int j = (i + 1) % n;
      m(i, i) += 2 * h / 3;
      m(i, j) += h / 6;
      m(j, i) += h / 6;
      k(i, i) += 2 / h;
      k(i, j) -= 1 / h;
      k(j, i) -= 1 / h;
    }
  }
  Eigen::VectorXd d2(const Eigen::VectorXd& v) const { return -m.lu().solve(k * v); }
  double l2(const Eigen::VectorXd& v) const { return v.dot(m * v); }
  double h1(const Eigen::VectorXd& v) const { return v.dot(k * v); }
};

struct Rig {
  ReferenceMesh mesh;
  SurfaceOperators ops;
  FluidParams params;
  double tau;
  EnergyEvaluator ev;
  Rig(int nx, int ny, double tau_ = 0.01)
      : mesh(build_structured_mesh(2.0, nx, ny, LateralMode::periodic)),
        ops(surface_trace(mesh)),
        params(),
        tau(tau_),
        ev(mesh, ops, params, tau, quad_rule_triangle(6)) {}
  int n() const { return ops.num_nodes(); }
  Eigen::VectorXd nodal(const std::function<double(double)>& f) const {
    Eigen::VectorXd v(n());
    for (int i = 0; i < n(); ++i) v[i] = f(ops.surface().node_x[i]);
    return v;
  }
  Eigen::VectorXd vertex_velocity(const std::function<Eigen::Vector2d(Point2)>& f) const {
    const auto& d = ev.dofs();
    Eigen::VectorXd u = Eigen::VectorXd::Zero(d.num_velocity());
    for (int v = 0; v < d.num_vertices(); ++v) {
      const Eigen::Vector2d val = f(mesh.vertices()[v]);
      u[d.vertex_velocity(v, 0)] = val[0];
      u[d.vertex_velocity(v, 1)] = val[1];
    }
    return u;
  }
};

// coarse P1 value at a point by brute-force cell search
double eval_p1(const ReferenceMesh& m, const Eigen::VectorXd& vals, Point2 x) {
  for (int c = 0; c < m.num_cells(); ++c) {
    const TriangleMap t(m.cell_corners(c));
    double l[3];
    for (int k = 1; k < 3; ++k)
      l[k] = t.grad_lambda[k].x() * (x.x - t.corners[0].x) + t.grad_lambda[k].y() * (x.y - t.corners[0].y);
    l[0] = 1 - l[1] - l[2];
    if (l[0] >= -1e-12 && l[1] >= -1e-12 && l[2] >= -1e-12) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += l[k] * vals[m.cells()[c][k]];
      return s;
    }
  }
  throw std::logic_error("point outside mesh");
}

}  // namespace

TEST_CASE("energy of the rest state") {
  Rig r(10, 5);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(r.n());
  const auto g = evaluate_geometry(one, one, r.tau, r.mesh);
  const SurfaceField zero{FieldKind::xi, Eigen::VectorXd::Zero(r.n())};
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(r.ev.dofs().num_velocity());
  CHECK(r.ev.energy(u, g, zero, {FieldKind::eta, one}, zero) == 0.0);
  CHECK(r.ev.dissipation_d1(zero, zero) == 0.0);
  CHECK(r.ev.dissipation_d2(u, u, g, zero, zero, zero, zero) == 0.0);
  CHECK(r.ev.viscous(u, g) == 0.0);
}

TEST_CASE("elastic energy of a cosine interface") {
  const double a = 0.1;
  const double gamma1 = 0.1;
  const double exact = 0.5 * gamma1 * M_PI * M_PI * a * a;
  double prev_err = 1.0;
  for (int nx : {20, 40, 80}) {
    Rig r(nx, 2);
    const Eigen::VectorXd eta = r.nodal([&](double x) { return 1 + a * std::cos(M_PI * x); });
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(r.n());
    const auto g = evaluate_geometry(one, one, r.tau, r.mesh);
    const SurfaceField zero{FieldKind::xi, Eigen::VectorXd::Zero(r.n())};
    const double e = r.ev.energy(Eigen::VectorXd::Zero(r.ev.dofs().num_velocity()), g, zero,
                                 {FieldKind::eta, eta}, zero);
    const double err = std::abs(e - exact) / exact;
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 1e-3);
}

TEST_CASE("weighted kinetic and viscous terms") {
  Rig r(10, 5);
  const Eigen::VectorXd eta = r.nodal([](double x) { return 1 + 0.1 * std::cos(M_PI * x); });
  const Eigen::VectorXd eta_prev = r.nodal([](double x) { return 1 + 0.2 * std::sin(M_PI * x); });
  const auto g = evaluate_geometry(eta, eta_prev, r.tau, r.mesh);
  const Eigen::VectorXd u = r.vertex_velocity([](Point2) { return Eigen::Vector2d(1.0, 0.0); });
  // int eta dx over the reference domain; eta has mean one
  CHECK(r.ev.weighted_kinetic(u, g) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(r.ev.weighted_kinetic(u, g, true) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(r.ev.weighted_kinetic(2 * u, g) == doctest::Approx(4 * r.ev.weighted_kinetic(u, g)));
  CHECK(r.ev.viscous(u, g) < 1e-28);

  const Eigen::VectorXd one = Eigen::VectorXd::Ones(r.n());
  const auto flat = evaluate_geometry(one, one, r.tau, r.mesh);
  const Eigen::VectorXd shear = r.vertex_velocity([](Point2 p) { return Eigen::Vector2d(p.y, 0.0); });
  // |sym grad u|^2 = 1/2 on an area-2 domain
  CHECK(r.ev.viscous(shear, flat) == doctest::Approx(2 * r.params.mu).epsilon(1e-13));
}

TEST_CASE("dissipation terms against dense oracles") {
  Rig r(12, 2, 0.02);
  const Dense d(12, 2.0 / 12);
  const double tau = r.tau;
  const auto& p = r.params;
  std::mt19937 rng(17);
  const Eigen::VectorXd xi = random_vector(r.n(), rng);
  const Eigen::VectorXd xi_prev = random_vector(r.n(), rng);
  const Eigen::VectorXd z1 = random_vector(r.n(), rng);
  const Eigen::VectorXd z0 = random_vector(r.n(), rng);

  auto comb = [&](const Eigen::VectorXd& z) { return Eigen::VectorXd(p.gamma1 * z - p.gamma2 * d.d2(z)); };
  const double d1 = 0.5 * tau * tau * (p.gamma1 * d.h1(xi) + p.gamma2 * d.l2(d.d2(xi))) +
                    0.5 * tau * tau / p.rho_s * d.l2(comb(z1));
  CHECK(r.ev.dissipation_d1({FieldKind::xi, xi}, {FieldKind::zeta, z1}) == doctest::Approx(d1).epsilon(1e-12));

  const Eigen::VectorXd dxi = (xi - xi_prev) / tau;
  const double surface_part =
      0.5 * p.rho_s * tau * d.l2(dxi) + 0.5 * p.gamma1 * tau * d.h1(xi) + 0.5 * p.gamma2 * tau * d.l2(d.d2(xi)) +
      0.5 * std::pow(tau, 3) *
          (p.gamma1 * d.h1(dxi) + p.gamma2 * d.l2(d.d2(dxi)) + d.l2((comb(z1) - comb(z0)) / tau) / p.rho_s);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(r.n());
  const auto g = evaluate_geometry(one, one, tau, r.mesh);
  const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(r.ev.dofs().num_velocity());
  CHECK(r.ev.dissipation_d2(u0, u0, g, {FieldKind::xi, xi}, {FieldKind::xi, xi_prev}, {FieldKind::zeta, z1},
                            {FieldKind::zeta, z0}) == doctest::Approx(surface_part).epsilon(1e-12));

  // stationary structure: the tau^3 block and the inertia part vanish
  const double still = 0.5 * p.gamma1 * tau * d.h1(xi) + 0.5 * p.gamma2 * tau * d.l2(d.d2(xi));
  CHECK(r.ev.dissipation_d2(u0, u0, g, {FieldKind::xi, xi}, {FieldKind::xi, xi}, {FieldKind::zeta, z1},
                            {FieldKind::zeta, z1}) == doctest::Approx(still).epsilon(1e-12));

  // fluid part: unit horizontal jump over one step with mean-one previous height
  const Eigen::VectorXd eta_prev = r.nodal([](double x) { return 1 + 0.1 * std::cos(M_PI * x); });
  const auto gm = evaluate_geometry(one, eta_prev, tau, r.mesh);
  const Eigen::VectorXd u1 = r.vertex_velocity([](Point2) { return Eigen::Vector2d(1.0, 0.0); });
  const SurfaceField zero{FieldKind::xi, Eigen::VectorXd::Zero(r.n())};
  CHECK(r.ev.dissipation_d2(u1, u0, gm, zero, zero, zero, zero) == doctest::Approx(0.5 * tau * 2.0 / (tau * tau)));
}

TEST_CASE("energy ledger") {
  EnergyLedger l(0.1, 2.0, 0.5);
  const auto r1 = l.add(1, 0.1, 1.5, 4.0, 0.2, 3.0);
  CHECK(r1.identity_residual == doctest::Approx(std::abs(1.5 + 0.2 + 0.1 * 7.0 - 2.5)));
  const auto r2 = l.add(2, 0.2, 1.0, 0.0, 0.0, 0.0);
  CHECK(r2.identity_residual == doctest::Approx(std::abs(1.0 + 0.7 - 2.5)));
  CHECK(l.records().size() == 2u);
  CHECK(l.max_residual() == doctest::Approx(0.8));
}

TEST_CASE("modified no-slip residual") {
  Rig r(10, 2);
  const ShellParams sp = r.params.shell();
  const Eigen::VectorXd xi = r.nodal([](double x) { return std::sin(M_PI * x); });
  const Eigen::VectorXd dx = delta_xi(r.ops, sp, {FieldKind::xi, xi}).values;
  const Eigen::VectorXd u2 = xi + r.tau * r.tau / sp.rho_s * dx;
  CHECK(modified_noslip_residual(r.ops, sp, r.tau, {FieldKind::generic, u2}, {FieldKind::xi, xi}) < 1e-14);
  CHECK(modified_noslip_residual(r.ops, sp, r.tau, {FieldKind::generic, xi}, {FieldKind::xi, xi}) ==
        doctest::Approx(r.tau * r.tau * dx.cwiseAbs().maxCoeff()));
}

TEST_CASE("nested prolongation is exact for P1 fields") {
  for (auto mode : {LateralMode::periodic, LateralMode::clamped}) {
    const auto coarse = build_structured_mesh(2.0, 5, 3, mode);
    const auto fine = refine(refine(coarse));
    std::mt19937 rng(1);
    const Eigen::VectorXd c = random_vector(coarse.num_vertices(), rng);
    const Eigen::VectorXd f = prolong_vertex_field(coarse, fine, c);
    double worst = 0.0;
    for (int v = 0; v < fine.num_vertices(); ++v) {
      const Point2 x = fine.vertices()[v];
      worst = std::max(worst, std::abs(f[v] - eval_p1(coarse, c, x)));
    }
    CHECK(worst < 1e-13);

    // interleaved components
    Eigen::VectorXd two(2 * coarse.num_vertices());
    for (int v = 0; v < coarse.num_vertices(); ++v) {
      two[2 * v] = c[v];
      two[2 * v + 1] = -3 * c[v];
    }
    CHECK((prolong_vertex_field(coarse, fine, two, 2, 1) + 3 * f).cwiseAbs().maxCoeff() < 1e-13);

    const auto cs = surface_trace(coarse);
    const auto fs = surface_trace(fine);
    const Eigen::VectorXd sc = random_vector(cs.num_nodes(), rng);
    const Eigen::VectorXd sf = prolong_surface_field(cs, fs, sc);
    for (int i = 0; i < fs.num_nodes(); ++i) {
      const double x = fs.node_x[i];
      const int seg = std::min(static_cast<int>(x / cs.segment_length()), cs.num_segments() - 1);
      const double s = x / cs.segment_length() - seg;
      const auto [a, b] = cs.segments[seg];
      CHECK(sf[i] == doctest::Approx((1 - s) * sc[a] + s * sc[b]).epsilon(1e-13));
    }
  }
  const auto a = build_structured_mesh(2.0, 4, 2, LateralMode::periodic);
  const auto b = build_structured_mesh(2.0, 6, 4, LateralMode::periodic);
  CHECK_THROWS_AS(prolong_vertex_field(a, b, Eigen::VectorXd::Zero(a.num_vertices())), ConfigError);
}

TEST_CASE("error norms") {
  const auto coarse = build_structured_mesh(2.0, 4, 2, LateralMode::periodic);
  const auto fine = refine(coarse);
  const FluidDofMap cd(coarse), fd(fine);
  std::mt19937 rng(4);
  const Eigen::VectorXd uc = random_vector(cd.num_velocity(), rng);
  const Eigen::VectorXd xi = random_vector(4, rng), eta = random_vector(4, rng), zeta = random_vector(4, rng);

  SUBCASE("self comparison") {
    std::vector<TimeSlice> run{{uc, xi, eta, zeta}, {uc, xi, eta, zeta}};
    const auto e = error_norms(coarse, 0.1, run, coarse, 0.1, run, quad_rule_triangle(6));
    for (int i = 0; i < ErrorRecord::num_norms; ++i) CHECK(e.norm(i) == 0.0);
    CHECK(e.h == coarse.h());
    CHECK(e.tau == 0.1);
  }

  SUBCASE("fine interpolant of the same fields") {
    Eigen::VectorXd uf = Eigen::VectorXd::Zero(fd.num_velocity());
    for (int c = 0; c < 2; ++c) {
      const Eigen::VectorXd p = prolong_vertex_field(coarse, fine, uc, 2, c);
      for (int v = 0; v < fine.num_vertices(); ++v) uf[2 * v + c] = p[v];
    }
    const auto cs = surface_trace(coarse), fs = surface_trace(fine);
    const Eigen::VectorXd xif = prolong_surface_field(cs, fs, xi), etaf = prolong_surface_field(cs, fs, eta),
                          zf = prolong_surface_field(cs, fs, zeta);
    // reference steps twice as often; the run is paired with every second reference level
    // bubbles on either side do not enter the comparison
    uf.tail(2 * fine.num_cells()) = random_vector(2 * fine.num_cells(), rng);
    const Eigen::VectorXd junk = Eigen::VectorXd::Constant(fd.num_velocity(), 99.0);
    const Eigen::VectorXd sjunk = Eigen::VectorXd::Constant(8, 99.0);
    std::vector<TimeSlice> run{{uc, xi, eta, zeta}};
    std::vector<TimeSlice> ref{{junk, sjunk, sjunk, sjunk}, {uf, xif, etaf, zf}};
    const auto e = error_norms(coarse, 0.2, run, fine, 0.1, ref, quad_rule_triangle(6));
    for (int i = 0; i < ErrorRecord::num_norms; ++i) CHECK(e.norm(i) < 1e-13);
    ErrorAccumulator acc(coarse, 0.2, fine, 0.1, quad_rule_triangle(6));
    CHECK(acc.ratio() == 2);
  }

  CHECK_THROWS_AS(ErrorAccumulator(coarse, 0.1, fine, 0.03, quad_rule_triangle(6)), ConfigError);
}

TEST_CASE("convergence rates") {
  auto r = convergence_rates({0.2, 0.1}, {4.0, 1.0});
  REQUIRE(r.pair_rates[0].has_value());
  CHECK(*r.pair_rates[0] == doctest::Approx(2.0));
  CHECK(*r.slope == doctest::Approx(2.0));
  r = convergence_rates({0.2, 0.1}, {2.0, 1.0});
  CHECK(*r.pair_rates[0] == doctest::Approx(1.0));
  r = convergence_rates({0.4, 0.2, 0.1}, {1.0, 0.5, 0.25});
  CHECK(*r.slope == doctest::Approx(1.0));
  r = convergence_rates({0.2, 0.1}, {0.0, 0.0});
  CHECK_FALSE(r.pair_rates[0].has_value());
  CHECK_FALSE(r.slope.has_value());
  CHECK_THROWS_AS(convergence_rates({0.1, 0.2}, {1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(convergence_rates({0.1}, {1.0}), ConfigError);
}
