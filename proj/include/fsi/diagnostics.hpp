#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fsi/ale.hpp"
#include "fsi/dofs.hpp"
#include "fsi/fluid.hpp"
#include "fsi/mesh.hpp"
#include "fsi/quadrature.hpp"
#include "fsi/structure.hpp"

namespace fsi {

struct EnergyRecord {
  int k = 0;
  double t = 0.0;
  double E = 0.0;
  double visc = 0.0;  ///< 2 mu int eta^k |sym(grad u F^-1)|^2
  double D1 = 0.0;
  double D2 = 0.0;
  double identity_residual = 0.0;
};

/// Energy functionals of the discrete scheme. Volume integrals use the
/// assembly rule and the same AleGeometry as the fluid solve.
class EnergyEvaluator {
public:
  EnergyEvaluator(const ReferenceMesh& mesh, const SurfaceOperators& ops, FluidParams params,
                  double tau, QuadratureRule quad);

  /// int h |u|^2 with h = eta_now (or eta_prev) of `geom`.
  double weighted_kinetic(const Eigen::VectorXd& velocity, const AleGeometry& geom,
                          bool previous_height = false) const;
  double viscous(const Eigen::VectorXd& velocity, const AleGeometry& geom) const;

  /// E^k from u^k, xi^k, eta^{k+1}, zeta^{k+1}; geom carries eta^k.
  double energy(const Eigen::VectorXd& velocity, const AleGeometry& geom, const SurfaceField& xi,
                const SurfaceField& eta_next, const SurfaceField& zeta_next) const;
  double dissipation_d1(const SurfaceField& xi, const SurfaceField& zeta_next) const;
  double dissipation_d2(const Eigen::VectorXd& velocity, const Eigen::VectorXd& velocity_prev,
                        const AleGeometry& geom, const SurfaceField& xi,
                        const SurfaceField& xi_prev, const SurfaceField& zeta_next,
                        const SurfaceField& zeta_k) const;

  const FluidDofMap& dofs() const { return dofs_; }
  double tau() const { return tau_; }

private:
  /// gamma1 zeta - gamma2 d2_h zeta
  Eigen::VectorXd shell_combination(const Eigen::VectorXd& zeta) const;

  const ReferenceMesh* mesh_;
  const SurfaceOperators* ops_;
  FluidParams params_;
  double tau_;
  QuadratureRule quad_;
  FluidDofMap dofs_;
  std::array<std::vector<P1BubbleShapes>, 2> shapes_;
};

/// Running sum for the discrete energy identity.
class EnergyLedger {
public:
  EnergyLedger(double tau, double e0, double d1_0);

  EnergyRecord add(int k, double t, double E, double visc, double D1, double D2);

  const EnergyRecord& initial() const { return initial_; }
  const std::vector<EnergyRecord>& records() const { return records_; }
  double max_residual() const;

private:
  double tau_;
  EnergyRecord initial_;
  double dissipated_ = 0.0;
  std::vector<EnergyRecord> records_;
};

/// max over interface nodes of |u2 - xi - (tau^2/rho_s) Delta_xi|.
double modified_noslip_residual(const SurfaceOperators& ops, const ShellParams& p, double tau,
                                const SurfaceField& u_top, const SurfaceField& xi);

struct ErrorRecord {
  double h = 0.0;
  double tau = 0.0;
  double eu_LiL2 = 0.0;
  double exi_LiL2 = 0.0;
  double eeta_LiL2 = 0.0;
  double gradeeta_LiL2 = 0.0;
  double ezeta_LiL2 = 0.0;
  double gradeu_L2L2 = 0.0;

  static constexpr int num_norms = 6;
  double norm(int i) const;
  static const char* norm_name(int i);
};

/// Fields compared at one time level t^k: u^k, xi^k, eta^k, zeta^k.
struct TimeSlice {
  const Eigen::VectorXd& velocity;
  const Eigen::VectorXd& xi;
  const Eigen::VectorXd& eta;
  const Eigen::VectorXd& zeta;
};

/// Nodal P1 values of a coarse vertex field at the vertices of a nested mesh.
/// `stride` interleaved components per vertex, component `comp` is read.
Eigen::VectorXd prolong_vertex_field(const ReferenceMesh& coarse, const ReferenceMesh& fine,
                                     const Eigen::VectorXd& values, int stride = 1, int comp = 0);
Eigen::VectorXd prolong_surface_field(const SurfaceMesh& coarse, const SurfaceMesh& fine,
                                      const Eigen::VectorXd& values);

/// Streaming error norms between a run and a reference on a nested mesh and
/// a nested time grid. Feed the two trajectories at every coarse time level.
class ErrorAccumulator {
public:
  ErrorAccumulator(const ReferenceMesh& run_mesh, double run_tau, const ReferenceMesh& ref_mesh,
                   double ref_tau, QuadratureRule quad);

  /// Reference steps per run step.
  int ratio() const { return ratio_; }
  void add(const TimeSlice& run, const TimeSlice& ref);
  ErrorRecord result() const;

private:
  const ReferenceMesh* run_mesh_;
  const ReferenceMesh* ref_mesh_;
  SurfaceMesh run_surface_;
  SurfaceOperators ref_ops_;
  FluidDofMap ref_dofs_;
  QuadratureRule quad_;
  std::array<std::vector<P1BubbleShapes>, 2> shapes_;
  double run_tau_;
  int ratio_;
  ErrorRecord acc_;
  double gradeu_sq_ = 0.0;
};

/// One-shot form of ErrorAccumulator over stored trajectories.
ErrorRecord error_norms(const ReferenceMesh& run_mesh, double run_tau,
                        const std::vector<TimeSlice>& run, const ReferenceMesh& ref_mesh,
                        double ref_tau, const std::vector<TimeSlice>& ref,
                        const QuadratureRule& quad);

struct RateSummary {
  std::vector<std::optional<double>> pair_rates;
  std::optional<double> slope;  ///< least squares over the whole ladder
};

/// Rates of `errors` against the refinement parameter (h or tau), coarse first.
RateSummary convergence_rates(const std::vector<double>& params, const std::vector<double>& errors);

}  // namespace fsi
