#include "fsi/structure.hpp"

#include <cmath>

#include "fsi/ale.hpp"
#include "fsi/errors.hpp"
#include "fsi/quadrature.hpp"

namespace fsi {

SurfaceOperators::SurfaceOperators(const SurfaceMesh& surface) : surface_(surface) {
  const int n = surface.num_nodes();
  const double hs = surface.segment_length();
  std::vector<Triplet> m, k;
  for (const auto& [a, b] : surface.segments) {
    m.emplace_back(a, a, hs / 3.0);
    m.emplace_back(b, b, hs / 3.0);
    m.emplace_back(a, b, hs / 6.0);
    m.emplace_back(b, a, hs / 6.0);
    k.emplace_back(a, a, 1.0 / hs);
    k.emplace_back(b, b, 1.0 / hs);
    k.emplace_back(a, b, -1.0 / hs);
    k.emplace_back(b, a, -1.0 / hs);
  }
  mass_.resize(n, n);
  mass_.setFromTriplets(m.begin(), m.end());
  mass_.makeCompressed();
  stiffness_.resize(n, n);
  stiffness_.setFromTriplets(k.begin(), k.end());
  stiffness_.makeCompressed();

  free_index_.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (surface.periodic() || (i != 0 && i != n - 1)) {
      free_index_[i] = static_cast<int>(free_.size());
      free_.push_back(i);
    }
  }
  std::vector<Triplet> mf;
  for (int col = 0; col < mass_.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(mass_, col); it; ++it) {
      const int r = free_index_[it.row()];
      const int c = free_index_[col];
      if (r >= 0 && c >= 0) mf.emplace_back(r, c, it.value());
    }
  }
  mass_free_.resize(free_.size(), free_.size());
  mass_free_.setFromTriplets(mf.begin(), mf.end());
  mass_factor_.compute(mass_free_);
  if (mass_factor_.info() != Eigen::Success) {
    throw SolverError("surface mass matrix factorization failed");
  }
}

Eigen::VectorXd SurfaceOperators::solve_mass(const Eigen::VectorXd& r) const {
  Eigen::VectorXd rf(free_.size());
  for (size_t i = 0; i < free_.size(); ++i) rf[i] = r[free_[i]];
  const Eigen::VectorXd wf = mass_factor_.solve(rf);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(num_nodes());
  for (size_t i = 0; i < free_.size(); ++i) w[free_[i]] = wf[i];
  return w;
}

Eigen::VectorXd SurfaceOperators::second_derivative(const Eigen::VectorXd& v) const {
  return -solve_mass(stiffness_ * v);
}

Eigen::VectorXd SurfaceOperators::load_vector(const std::function<double(double)>& g,
                                              int points) const {
  const LineRule rule = gauss_legendre(points);
  const double hs = surface_.segment_length();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(num_nodes());
  for (int e = 0; e < surface_.num_segments(); ++e) {
    const auto [a, b] = surface_.segments[e];
    for (int q = 0; q < rule.size(); ++q) {
      const double s = rule.points[q];
      const double gx = g((e + s) * hs) * rule.weights[q] * hs;
      f[a] += (1.0 - s) * gx;
      f[b] += s * gx;
    }
  }
  return f;
}

Eigen::VectorXd SurfaceOperators::restrict_to_space(Eigen::VectorXd v) const {
  for (int i = 0; i < num_nodes(); ++i) {
    if (!is_free(i)) v[i] = 0.0;
  }
  return v;
}

SurfaceField discrete_laplace(const SurfaceOperators& ops, const SurfaceField& eta) {
  return {FieldKind::zeta, -ops.second_derivative(eta.values)};
}

double elastic_form_apply(const SurfaceOperators& ops, const ShellParams& p,
                          const SurfaceField& eta, const SurfaceField& zeta,
                          const SurfaceField& psi) {
  const Eigen::VectorXd load = p.gamma1 * eta.values + p.gamma2 * zeta.values;
  return psi.values.dot(ops.stiffness() * load);
}

SurfaceField delta_xi(const SurfaceOperators& ops, const ShellParams& p, const SurfaceField& xi) {
  const Eigen::VectorXd inner =
      p.gamma2 * ops.second_derivative(xi.values) - p.gamma1 * xi.values;
  return {FieldKind::delta_xi, ops.second_derivative(inner)};
}

SurfaceField predict_initial(const SurfaceField& eta0, const SurfaceField& xi0, double tau,
                             double eta_floor) {
  Eigen::VectorXd eta1(eta0.size());
  for (int i = 0; i < eta0.size(); ++i) eta1[i] = std::fma(tau, xi0.values[i], eta0.values[i]);
  check_height_floor(eta1, eta_floor);
  return {FieldKind::eta, std::move(eta1)};
}

Step2Solver::Step2Solver(const SurfaceOperators& ops, const ShellParams& params, double tau,
                         double eta_floor)
    : ops_(&ops), params_(params), tau_(tau), eta_floor_(eta_floor) {
  if (!(tau > 0.0)) throw ConfigError("structure solve: tau must be positive");
  const int nf = static_cast<int>(ops.free_nodes().size());
  const double inertia = params.rho_s / tau;
  std::vector<Triplet> t;
  auto add_block = [&](const SparseMatrix& src, double scale, int row0, int col0) {
    for (int col = 0; col < src.outerSize(); ++col) {
      for (SparseMatrix::InnerIterator it(src, col); it; ++it) {
        const int r = ops.free_index(static_cast<int>(it.row()));
        const int c = ops.free_index(col);
        if (r >= 0 && c >= 0) t.emplace_back(row0 + r, col0 + c, scale * it.value());
      }
    }
  };
  add_block(ops.mass(), inertia, 0, 0);
  add_block(ops.stiffness(), params.gamma1 * tau, 0, 0);
  add_block(ops.stiffness(), params.gamma2, 0, nf);
  add_block(ops.stiffness(), -tau, nf, 0);
  add_block(ops.mass(), 1.0, nf, nf);
  matrix_.resize(2 * nf, 2 * nf);
  matrix_.setFromTriplets(t.begin(), t.end());
  matrix_.makeCompressed();
  lu_.compute(matrix_);
  if (lu_.info() != Eigen::Success) throw SolverError("structure matrix is singular");
}

Step2Result Step2Solver::solve(const SurfaceField& u_top, const SurfaceField& eta_k,
                               const SurfaceField& zeta_k) const {
  const auto& ops = *ops_;
  const auto& free = ops.free_nodes();
  const int nf = static_cast<int>(free.size());
  const Eigen::VectorXd momentum =
      (params_.rho_s / tau_) * (ops.mass() * u_top.values) +
      params_.gamma2 * (ops.stiffness() * zeta_k.values);
  const Eigen::VectorXd constraint = ops.stiffness() * eta_k.values;
  Eigen::VectorXd rhs(2 * nf);
  for (int i = 0; i < nf; ++i) {
    rhs[i] = momentum[free[i]];
    rhs[nf + i] = constraint[free[i]];
  }
  const Eigen::VectorXd sol = lu_.solve(rhs);

  const int n = ops.num_nodes();
  Step2Result r;
  r.xi = {FieldKind::xi, Eigen::VectorXd::Zero(n)};
  r.zeta_next = {FieldKind::zeta, Eigen::VectorXd::Zero(n)};
  for (int i = 0; i < nf; ++i) {
    r.xi.values[free[i]] = sol[i];
    r.zeta_next.values[free[i]] = sol[nf + i];
  }
  r.eta_next = predict_initial(eta_k, r.xi, tau_, eta_floor_);
  return r;
}

}  // namespace fsi
