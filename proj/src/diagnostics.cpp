#include "fsi/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "fsi/errors.hpp"

namespace fsi {

namespace {

std::array<std::vector<P1BubbleShapes>, 2> reference_shapes(const ReferenceMesh& mesh,
                                                            const QuadratureRule& quad) {
  std::array<std::vector<P1BubbleShapes>, 2> out;
  for (int type = 0; type < 2; ++type) {
    const TriangleMap tri(mesh.cell_corners(type));
    for (const auto& p : quad.points) out[type].push_back(eval_p1_bubble(tri, p));
  }
  return out;
}

Point2 quad_point(const std::array<Point2, 3>& c, const std::array<double, 3>& l) {
  return {l[0] * c[0].x + l[1] * c[1].x + l[2] * c[2].x, l[0] * c[0].y + l[1] * c[1].y + l[2] * c[2].y};
}

}  // namespace

EnergyEvaluator::EnergyEvaluator(const ReferenceMesh& mesh, const SurfaceOperators& ops,
                                 FluidParams params, double tau, QuadratureRule quad)
    : mesh_(&mesh),
      ops_(&ops),
      params_(params),
      tau_(tau),
      quad_(std::move(quad)),
      dofs_(mesh),
      shapes_(reference_shapes(mesh, quad_)) {}

double EnergyEvaluator::weighted_kinetic(const Eigen::VectorXd& velocity, const AleGeometry& geom,
                                         bool previous_height) const {
  const ReferenceMesh& mesh = *mesh_;
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto corners = mesh.cell_corners(c);
    const auto d = dofs_.cell_dofs(mesh, c);
    const double wscale = 2.0 * mesh.cell_area();
    for (int q = 0; q < quad_.size(); ++q) {
      const Point2 x = quad_point(corners, quad_.points[q]);
      const AlePoint g = geom.at(c, x);
      const VelocitySample s = sample_velocity(velocity, dofs_, d, shapes_[c % 2][q]);
      const double h = previous_height ? g.eta_prev : g.J;
      sum += quad_.weights[q] * wscale * h * s.value.squaredNorm();
    }
  }
  return sum;
}

double EnergyEvaluator::viscous(const Eigen::VectorXd& velocity, const AleGeometry& geom) const {
  const ReferenceMesh& mesh = *mesh_;
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto corners = mesh.cell_corners(c);
    const auto d = dofs_.cell_dofs(mesh, c);
    const double wscale = 2.0 * mesh.cell_area();
    for (int q = 0; q < quad_.size(); ++q) {
      const Point2 x = quad_point(corners, quad_.points[q]);
      const AlePoint g = geom.at(c, x);
      const VelocitySample s = sample_velocity(velocity, dofs_, d, shapes_[c % 2][q]);
      const Eigen::Matrix2d gx = s.grad * g.Finv;
      const Eigen::Matrix2d sym = 0.5 * (gx + gx.transpose());
      sum += quad_.weights[q] * wscale * g.J * sym.squaredNorm();
    }
  }
  return 2.0 * params_.mu * sum;
}

Eigen::VectorXd EnergyEvaluator::shell_combination(const Eigen::VectorXd& zeta) const {
  return params_.gamma1 * zeta - params_.gamma2 * ops_->second_derivative(zeta);
}

double EnergyEvaluator::energy(const Eigen::VectorXd& velocity, const AleGeometry& geom,
                               const SurfaceField& xi, const SurfaceField& eta_next,
                               const SurfaceField& zeta_next) const {
  const SurfaceOperators& ops = *ops_;
  return 0.5 * params_.rho_f * weighted_kinetic(velocity, geom) +
         0.5 * params_.rho_s * ops.l2_norm_sq(xi.values) +
         0.5 * params_.gamma1 * ops.h1_seminorm_sq(eta_next.values) +
         0.5 * params_.gamma2 * ops.l2_norm_sq(zeta_next.values);
}

double EnergyEvaluator::dissipation_d1(const SurfaceField& xi, const SurfaceField& zeta_next) const {
  const SurfaceOperators& ops = *ops_;
  const double t2 = tau_ * tau_;
  return 0.5 * t2 *
             (params_.gamma1 * ops.h1_seminorm_sq(xi.values) +
              params_.gamma2 * ops.l2_norm_sq(ops.second_derivative(xi.values))) +
         0.5 * t2 / params_.rho_s * ops.l2_norm_sq(shell_combination(zeta_next.values));
}

double EnergyEvaluator::dissipation_d2(const Eigen::VectorXd& velocity,
                                       const Eigen::VectorXd& velocity_prev,
                                       const AleGeometry& geom, const SurfaceField& xi,
                                       const SurfaceField& xi_prev, const SurfaceField& zeta_next,
                                       const SurfaceField& zeta_k) const {
  const SurfaceOperators& ops = *ops_;
  const double tau = tau_;
  const Eigen::VectorXd dtu = (velocity - velocity_prev) / tau;
  const Eigen::VectorXd dtxi = (xi.values - xi_prev.values) / tau;
  const Eigen::VectorXd dtz =
      (shell_combination(zeta_next.values) - shell_combination(zeta_k.values)) / tau;
  const double g1 = params_.gamma1;
  const double g2 = params_.gamma2;

  double d = 0.5 * tau * params_.rho_f * weighted_kinetic(dtu, geom, true);
  d += 0.5 * params_.rho_s * tau * ops.l2_norm_sq(dtxi);
  d += 0.5 * g1 * tau * ops.h1_seminorm_sq(xi.values);
  d += 0.5 * g2 * tau * ops.l2_norm_sq(ops.second_derivative(xi.values));
  d += 0.5 * tau * tau * tau *
       (g1 * ops.h1_seminorm_sq(dtxi) + g2 * ops.l2_norm_sq(ops.second_derivative(dtxi)) +
        ops.l2_norm_sq(dtz) / params_.rho_s);
  return d;
}

EnergyLedger::EnergyLedger(double tau, double e0, double d1_0) : tau_(tau) {
  initial_.E = e0;
  initial_.D1 = d1_0;
}

EnergyRecord EnergyLedger::add(int k, double t, double E, double visc, double D1, double D2) {
  dissipated_ += tau_ * (visc + D2);
  EnergyRecord r{k, t, E, visc, D1, D2, 0.0};
  r.identity_residual = std::abs(E + D1 + dissipated_ - initial_.E - initial_.D1);
  records_.push_back(r);
  return r;
}

double EnergyLedger::max_residual() const {
  double m = 0.0;
  for (const auto& r : records_) m = std::max(m, r.identity_residual);
  return m;
}

double modified_noslip_residual(const SurfaceOperators& ops, const ShellParams& p, double tau,
                                const SurfaceField& u_top, const SurfaceField& xi) {
  const SurfaceField dx = delta_xi(ops, p, xi);
  const Eigen::VectorXd r = u_top.values - xi.values - (tau * tau / p.rho_s) * dx.values;
  return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}

double ErrorRecord::norm(int i) const {
  switch (i) {
    case 0: return eu_LiL2;
    case 1: return exi_LiL2;
    case 2: return eeta_LiL2;
    case 3: return gradeeta_LiL2;
    case 4: return ezeta_LiL2;
    case 5: return gradeu_L2L2;
    default: throw std::out_of_range("ErrorRecord::norm");
  }
}

const char* ErrorRecord::norm_name(int i) {
  static const char* names[] = {"eu_LiL2",       "exi_LiL2",   "eeta_LiL2",
                                "gradeeta_LiL2", "ezeta_LiL2", "gradeu_L2L2"};
  if (i < 0 || i >= num_norms) throw std::out_of_range("ErrorRecord::norm_name");
  return names[i];
}

namespace {

void check_nested(const ReferenceMesh& coarse, const ReferenceMesh& fine) {
  if (coarse.lateral_mode() != fine.lateral_mode() ||
      std::abs(coarse.length() - fine.length()) > 1e-12 * coarse.length() ||
      fine.nx() % coarse.nx() != 0 || fine.ny() % coarse.ny() != 0) {
    throw ConfigError("error norms: meshes are not nested");
  }
}

}  // namespace

Eigen::VectorXd prolong_vertex_field(const ReferenceMesh& coarse, const ReferenceMesh& fine,
                                     const Eigen::VectorXd& values, int stride, int comp) {
  check_nested(coarse, fine);
  const int rx = fine.nx() / coarse.nx();
  const int ry = fine.ny() / coarse.ny();
  auto at = [&](int i, int j) { return values[stride * coarse.vertex_index(i, j) + comp]; };
  Eigen::VectorXd out(fine.num_vertices());
  for (int J = 0; J <= fine.ny(); ++J) {
    for (int I = 0; I < fine.columns(); ++I) {
      int i = I / rx;
      int j = J / ry;
      double s = static_cast<double>(I % rx) / rx;
      double t = static_cast<double>(J % ry) / ry;
      if (i == coarse.nx()) { i -= 1; s = 1.0; }
      if (j == coarse.ny()) { j -= 1; t = 1.0; }
      const double ll = at(i, j);
      const double ur = at(i + 1, j + 1);
      double v;
      if (s >= t) {
        v = (1.0 - s) * ll + (s - t) * at(i + 1, j) + t * ur;
      } else {
        v = (1.0 - t) * ll + s * ur + (t - s) * at(i, j + 1);
      }
      out[fine.vertex_index(I, J)] = v;
    }
  }
  return out;
}

Eigen::VectorXd prolong_surface_field(const SurfaceMesh& coarse, const SurfaceMesh& fine,
                                      const Eigen::VectorXd& values) {
  const int nc = coarse.num_segments();
  const int nf = fine.num_segments();
  if (nf % nc != 0 || coarse.mode != fine.mode) {
    throw ConfigError("error norms: surface meshes are not nested");
  }
  const int r = nf / nc;
  Eigen::VectorXd out(fine.num_nodes());
  for (int I = 0; I < fine.num_nodes(); ++I) {
    const int i = I / r;
    const double s = static_cast<double>(I % r) / r;
    const int right = (i + 1) % coarse.num_nodes();
    out[I] = s == 0.0 ? values[i] : (1.0 - s) * values[i] + s * values[right];
  }
  return out;
}

ErrorAccumulator::ErrorAccumulator(const ReferenceMesh& run_mesh, double run_tau,
                                   const ReferenceMesh& ref_mesh, double ref_tau,
                                   QuadratureRule quad)
    : run_mesh_(&run_mesh),
      ref_mesh_(&ref_mesh),
      run_surface_(surface_trace(run_mesh)),
      ref_ops_(surface_trace(ref_mesh)),
      ref_dofs_(ref_mesh),
      quad_(std::move(quad)),
      shapes_(reference_shapes(ref_mesh, quad_)),
      run_tau_(run_tau) {
  check_nested(run_mesh, ref_mesh);
  const double r = run_tau / ref_tau;
  ratio_ = static_cast<int>(std::lround(r));
  if (ratio_ < 1 || std::abs(r - ratio_) > 1e-9 * r) {
    throw ConfigError("error norms: reference time step does not divide the run time step");
  }
  acc_.h = run_mesh.h();
  acc_.tau = run_tau;
}

void ErrorAccumulator::add(const TimeSlice& run, const TimeSlice& ref) {
  const ReferenceMesh& fine = *ref_mesh_;
  const SurfaceOperators& ops = ref_ops_;

  // vertex parts only: both bubbles are dropped
  Eigen::VectorXd e = ref.velocity;
  e.tail(2 * fine.num_cells()).setZero();
  for (int c = 0; c < 2; ++c) {
    const Eigen::VectorXd p = prolong_vertex_field(*run_mesh_, fine, run.velocity, 2, c);
    for (int v = 0; v < fine.num_vertices(); ++v) e[2 * v + c] -= p[v];
  }
  double l2 = 0.0;
  double h1 = 0.0;
  for (int c = 0; c < fine.num_cells(); ++c) {
    const auto d = ref_dofs_.cell_dofs(fine, c);
    const double wscale = 2.0 * fine.cell_area();
    for (int q = 0; q < quad_.size(); ++q) {
      const VelocitySample s = sample_velocity(e, ref_dofs_, d, shapes_[c % 2][q]);
      l2 += quad_.weights[q] * wscale * s.value.squaredNorm();
      h1 += quad_.weights[q] * wscale * s.grad.squaredNorm();
    }
  }
  acc_.eu_LiL2 = std::max(acc_.eu_LiL2, std::sqrt(l2));
  gradeu_sq_ += run_tau_ * h1;

  const SurfaceMesh& fs = ops.surface();
  auto surf = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) -> Eigen::VectorXd {
    return b - prolong_surface_field(run_surface_, fs, a);
  };
  const Eigen::VectorXd exi = surf(run.xi, ref.xi);
  const Eigen::VectorXd eeta = surf(run.eta, ref.eta);
  const Eigen::VectorXd ezeta = surf(run.zeta, ref.zeta);
  acc_.exi_LiL2 = std::max(acc_.exi_LiL2, std::sqrt(std::max(0.0, ops.l2_norm_sq(exi))));
  acc_.eeta_LiL2 = std::max(acc_.eeta_LiL2, std::sqrt(std::max(0.0, ops.l2_norm_sq(eeta))));
  acc_.gradeeta_LiL2 =
      std::max(acc_.gradeeta_LiL2, std::sqrt(std::max(0.0, ops.h1_seminorm_sq(eeta))));
  acc_.ezeta_LiL2 = std::max(acc_.ezeta_LiL2, std::sqrt(std::max(0.0, ops.l2_norm_sq(ezeta))));
}

ErrorRecord ErrorAccumulator::result() const {
  ErrorRecord r = acc_;
  r.gradeu_L2L2 = std::sqrt(gradeu_sq_);
  return r;
}

ErrorRecord error_norms(const ReferenceMesh& run_mesh, double run_tau,
                        const std::vector<TimeSlice>& run, const ReferenceMesh& ref_mesh,
                        double ref_tau, const std::vector<TimeSlice>& ref,
                        const QuadratureRule& quad) {
  ErrorAccumulator acc(run_mesh, run_tau, ref_mesh, ref_tau, quad);
  const size_t r = static_cast<size_t>(acc.ratio());
  if (ref.size() < run.size() * r) {
    throw ConfigError("error norms: reference trajectory is shorter than the run");
  }
  for (size_t i = 0; i < run.size(); ++i) acc.add(run[i], ref[(i + 1) * r - 1]);
  return acc.result();
}

RateSummary convergence_rates(const std::vector<double>& params, const std::vector<double>& errors) {
  if (params.size() != errors.size() || params.size() < 2) {
    throw ConfigError("convergence rates: need at least two matching records");
  }
  RateSummary out;
  bool all_positive = true;
  for (size_t i = 0; i + 1 < params.size(); ++i) {
    if (!(params[i] > params[i + 1])) throw ConfigError("convergence rates: ladder not refining");
    if (errors[i] > 0.0 && errors[i + 1] > 0.0) {
      out.pair_rates.push_back(std::log(errors[i] / errors[i + 1]) /
                               std::log(params[i] / params[i + 1]));
    } else {
      out.pair_rates.push_back(std::nullopt);
    }
  }
  for (double e : errors) all_positive = all_positive && e > 0.0;
  if (all_positive) {
    const int n = static_cast<int>(params.size());
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
      a(i, 0) = std::log(params[i]);
      a(i, 1) = 1.0;
      b[i] = std::log(errors[i]);
    }
    out.slope = a.colPivHouseholderQr().solve(b)[0];
  }
  return out;
}

}  // namespace fsi
