#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "fsi/errors.hpp"
#include "fsi/mesh.hpp"
#include "fsi/structure.hpp"

using namespace fsi;

namespace {

SurfaceMesh periodic_surface(int nx, double length = 2.0) {
  return surface_trace(build_structured_mesh(length, nx, 1, LateralMode::periodic));
}

// analytic periodic P1 mass and stiffness
struct Dense {
  Eigen::MatrixXd m, k;
  explicit Dense(int n, double h) : m(Eigen::MatrixXd::Zero(n, n)), k(Eigen::MatrixXd::Zero(n, n)) {
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
};

Eigen::VectorXd nodal(const SurfaceMesh& s, const std::function<double(double)>& f) {
  Eigen::VectorXd v(s.num_nodes());
  for (int i = 0; i < s.num_nodes(); ++i) v[i] = f(s.node_x[i]);
  return v;
}

double l2_error(const SurfaceOperators& ops, const Eigen::VectorXd& v, const std::function<double(double)>& f) {
  const Eigen::VectorXd e = v - nodal(ops.surface(), f);
  return std::sqrt(ops.l2_norm_sq(e));
}

}  // namespace

TEST_CASE("operators match the analytic periodic matrices") {
  const auto s = periodic_surface(10);
  const SurfaceOperators ops(s);
  const Dense d(10, 0.2);
  CHECK((Eigen::MatrixXd(ops.mass()) - d.m).norm() < 1e-14);
  CHECK((Eigen::MatrixXd(ops.stiffness()) - d.k).norm() < 1e-12);
  CHECK(ops.free_nodes().size() == 10u);
  std::mt19937 rng(3);
  std::normal_distribution<double> n01;
  Eigen::VectorXd v(10);
  for (auto& x : v) x = n01(rng);
  CHECK((ops.second_derivative(v) - d.d2(v)).norm() < 1e-12);
}

TEST_CASE("discrete laplace") {
  const auto s = periodic_surface(10);
  const SurfaceOperators ops(s);
  const auto z = discrete_laplace(ops, {FieldKind::eta, Eigen::VectorXd::Constant(10, 1.7)});
  CHECK(z.kind == FieldKind::zeta);
  CHECK(z.values.cwiseAbs().maxCoeff() < 1e-13);

  std::vector<double> err;
  for (int nx : {20, 40, 80, 160}) {
    const SurfaceOperators o(periodic_surface(nx));
    const auto zeta = discrete_laplace(o, {FieldKind::eta, nodal(o.surface(), [](double x) { return std::cos(M_PI * x); })});
    err.push_back(l2_error(o, zeta.values, [](double x) { return M_PI * M_PI * std::cos(M_PI * x); }));
    // zeta has zero mean on the periodic interface
    CHECK(std::abs(o.integral(zeta.values)) < 1e-12);
  }
  for (size_t i = 1; i < err.size(); ++i) CHECK(std::log2(err[i - 1] / err[i]) >= 1.0);

  // dense oracle at a fine level
  const SurfaceOperators fine(periodic_surface(640));
  const Dense d(640, 2.0 / 640);
  const Eigen::VectorXd eta = nodal(fine.surface(), [](double x) { return std::cos(M_PI * x); });
  CHECK((discrete_laplace(fine, {FieldKind::eta, eta}).values + d.d2(eta)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("discrete laplace in clamped mode lives on interior nodes") {
  const auto s = surface_trace(build_structured_mesh(1.0, 8, 1, LateralMode::clamped));
  const SurfaceOperators ops(s);
  CHECK(ops.free_nodes().size() == 7u);
  CHECK_FALSE(ops.is_free(0));
  CHECK_FALSE(ops.is_free(8));
  const auto z = discrete_laplace(ops, {FieldKind::eta, nodal(s, [](double x) { return x * (1 - x); })});
  CHECK(z.values[0] == 0.0);
  CHECK(z.values[8] == 0.0);
  // int zeta psi = int eta' psi' for every interior hat
  const Eigen::VectorXd lhs = ops.mass() * z.values;
  const Eigen::VectorXd rhs = ops.stiffness() * nodal(s, [](double x) { return x * (1 - x); });
  for (int i = 1; i < 8; ++i) CHECK(lhs[i] == doctest::Approx(rhs[i]));
}

TEST_CASE("elastic form") {
  const SurfaceOperators ops(periodic_surface(10));
  const ShellParams p{1.0, 0.1, 0.1};
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(10, 2.0);
  Eigen::VectorXd psi = Eigen::VectorXd::LinSpaced(10, 0.0, 1.0);
  CHECK(std::abs(elastic_form_apply(ops, p, {FieldKind::eta, c}, {FieldKind::zeta, c}, {FieldKind::generic, psi})) < 1e-13);

  const double h0 = 0.2;
  Eigen::VectorXd hat = Eigen::VectorXd::Zero(10);
  hat[4] = 1.0;
  const ShellParams only1{1.0, 1.0, 0.0};
  CHECK(elastic_form_apply(ops, only1, {FieldKind::eta, hat}, {FieldKind::zeta, c}, {FieldKind::generic, hat}) ==
        doctest::Approx(2 / h0));
}

TEST_CASE("delta xi") {
  const SurfaceOperators ops(periodic_surface(20));
  const ShellParams p{1.0, 0.1, 0.1};
  CHECK(delta_xi(ops, p, {FieldKind::xi, Eigen::VectorXd::Constant(20, 0.4)}).values.cwiseAbs().maxCoeff() < 1e-12);

  const ShellParams bending{1.0, 0.0, 1.0};
  auto exact = [](double x) { return std::pow(M_PI, 4) * std::cos(M_PI * x); };
  std::vector<double> err;
  for (int nx : {20, 40, 80, 160}) {
    const SurfaceOperators o(periodic_surface(nx));
    const auto d = delta_xi(o, bending, {FieldKind::xi, nodal(o.surface(), [](double x) { return std::cos(M_PI * x); })});
    err.push_back(l2_error(o, d.values, exact));
  }
  for (size_t i = 1; i < err.size(); ++i) CHECK(err[i] < err[i - 1]);
  CHECK(err.back() / std::sqrt(std::pow(M_PI, 8)) < 1e-2);

  const SurfaceOperators fine(periodic_surface(320));
  const Dense d(320, 2.0 / 320);
  const Eigen::VectorXd xi = nodal(fine.surface(), [](double x) { return std::cos(M_PI * x); });
  const Eigen::VectorXd oracle = d.d2(d.d2(xi));
  CHECK((delta_xi(fine, bending, {FieldKind::xi, xi}).values - oracle).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("predict initial") {
  const SurfaceField e0{FieldKind::eta, Eigen::VectorXd::Ones(5)};
  CHECK((predict_initial(e0, {FieldKind::xi, Eigen::VectorXd::Zero(5)}, 0.01).values - e0.values).norm() == 0.0);
  const auto e1 = predict_initial(e0, {FieldKind::xi, Eigen::VectorXd::Constant(5, 0.5)}, 0.01);
  for (double v : e1.values) CHECK(v == doctest::Approx(1.005).epsilon(1e-15));
  CHECK_THROWS_AS(predict_initial(e0, {FieldKind::xi, Eigen::VectorXd::Constant(5, -200.0)}, 0.01), GeometryError);
}

TEST_CASE("structure step") {
  const int n = 10;
  const SurfaceOperators ops(periodic_surface(n));
  const ShellParams p{1.0, 0.1, 0.1};
  const double tau = 0.01;
  const Step2Solver solver(ops, p, tau);
  CHECK(solver.matrix().rows() == 2 * n);

  SUBCASE("rest") {
    const auto r = solver.solve({FieldKind::generic, Eigen::VectorXd::Zero(n)}, {FieldKind::eta, Eigen::VectorXd::Ones(n)},
                                {FieldKind::zeta, Eigen::VectorXd::Zero(n)});
    CHECK(r.xi.values.norm() == 0.0);
    CHECK((r.eta_next.values.array() - 1.0).abs().maxCoeff() == 0.0);
    CHECK(r.zeta_next.values.norm() == 0.0);
  }

  SUBCASE("constant vertical velocity") {
    const double c = 0.37;
    const auto r = solver.solve({FieldKind::generic, Eigen::VectorXd::Constant(n, c)},
                                {FieldKind::eta, Eigen::VectorXd::Ones(n)}, {FieldKind::zeta, Eigen::VectorXd::Zero(n)});
    CHECK((r.xi.values.array() - c).abs().maxCoeff() < 1e-13);
    CHECK(r.zeta_next.values.cwiseAbs().maxCoeff() < 1e-13);
    CHECK((r.eta_next.values.array() - (1 + tau * c)).abs().maxCoeff() < 1e-15);
  }

  SUBCASE("random data against a dense solve") {
    std::mt19937 rng(11);
    std::normal_distribution<double> n01;
    Eigen::VectorXd u(n), eta(n), zeta(n);
    for (int i = 0; i < n; ++i) {
      u[i] = n01(rng);
      eta[i] = 1.0 + 0.1 * n01(rng);
      zeta[i] = n01(rng);
    }
    const Dense d(n, 0.2);
    Eigen::MatrixXd a(2 * n, 2 * n);
    a << p.rho_s / tau * d.m + p.gamma1 * tau * d.k, p.gamma2 * d.k, -tau * d.k, d.m;
    Eigen::VectorXd b(2 * n);
    b << p.rho_s / tau * d.m * u + p.gamma2 * d.k * zeta, d.k * eta;
    const Eigen::VectorXd x = a.fullPivLu().solve(b);
    const auto r = solver.solve({FieldKind::generic, u}, {FieldKind::eta, eta}, {FieldKind::zeta, zeta});
    CHECK((r.xi.values - x.head(n)).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((r.zeta_next.values - x.tail(n)).cwiseAbs().maxCoeff() < 1e-10);
    // zeta' is the discrete laplacian of the new height
    CHECK((r.zeta_next.values - discrete_laplace(ops, r.eta_next).values).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("load vector integrates smooth data") {
  const SurfaceOperators ops(periodic_surface(40));
  const auto f = ops.load_vector([](double x) { return std::sin(2 * M_PI * x) + 1.0; });
  CHECK(f.sum() == doctest::Approx(2.0).epsilon(1e-13));
  const Eigen::VectorXd x = nodal(ops.surface(), [](double x) { return std::sin(2 * M_PI * x); });
  // sum_i f_i sin(2 pi x_i) approximates int sin^2 = 1
  CHECK(f.dot(x) == doctest::Approx(1.0).epsilon(2e-2));
}
