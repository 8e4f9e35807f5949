#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fsi/ale.hpp"
#include "fsi/diagnostics.hpp"
#include "fsi/fluid.hpp"
#include "fsi/mesh.hpp"
#include "fsi/sparse.hpp"
#include "fsi/structure.hpp"

namespace fsi {

enum class ForcingKind { none, pulse };
enum class ForceSampling { left, right };

/// g(x1, t) = amplitude * t * sin(2 pi x1) for t <= switch_off, 0 afterwards.
struct Forcing {
  ForcingKind kind = ForcingKind::none;
  double amplitude = 200.0;
  double switch_off = 0.2;

  bool active(double t) const;
  double operator()(double x1, double t) const;
};

enum class InitialKind { rest, cosine };

struct SchemeConfig {
  FluidParams physics;
  double length = 2.0;
  int nx = 40;
  int ny = 20;
  LateralMode lateral = LateralMode::periodic;
  double tau = 2.5e-3;
  double final_time = 1.0;
  Forcing forcing;
  ForceSampling sampling = ForceSampling::right;
  InitialKind initial = InitialKind::rest;
  double initial_amplitude = 0.1;
  double eta_floor = 1e-6;
  SolverOptions solver;
  int quad_degree = 6;
  TopCondition top = TopCondition::penalty;
  bool check_divergence = false;

  /// Throws ConfigError naming the offending key.
  void validate() const;
  int num_steps() const;
};

/// eta0, xi0 on the interface nodes; u0 in the full MINI numbering.
struct InitialData {
  Eigen::VectorXd eta0;
  Eigen::VectorXd xi0;
  Eigen::VectorXd u0;

  static InitialData rest(const ReferenceMesh& mesh);
  /// eta0 = 1 + amplitude cos(2 pi x1 / L), everything else zero.
  static InitialData cosine(const ReferenceMesh& mesh, double amplitude);
  static InitialData from_config(const SchemeConfig& cfg, const ReferenceMesh& mesh);
};

/// After step k: u = u^k, xi = xi^k, eta = eta^{k+1}, eta_prev = eta^k,
/// zeta = zeta^{k+1}, zeta_prev = zeta^k, plus u_prev, xi_prev from step k-1.
struct SimulationState {
  int k = 0;
  double t = 0.0;
  FluidState u;
  FluidState u_prev;
  SurfaceField xi;
  SurfaceField xi_prev;
  SurfaceField eta;
  SurfaceField eta_prev;
  SurfaceField zeta;
  SurfaceField zeta_prev;

  /// Fields at t^k.
  TimeSlice slice() const { return {u.velocity, xi.values, eta_prev.values, zeta_prev.values}; }
};

struct StepRecord {
  EnergyRecord energy;
  double noslip_residual = 0.0;
  double divergence_residual = -1.0;  ///< negative when not evaluated
  double velocity_norm = 0.0;         ///< Euclidean norm of the velocity coefficients
  double max_abs_xi = 0.0;
  double max_abs_eta_dev = 0.0;       ///< max |eta^k - 1|
  double solver_residual = 0.0;
};

/// Partitioned time loop: prediction, then Step 1 (fluid) and Step 2
/// (structure) per step.
class Simulation {
public:
  Simulation(SchemeConfig cfg, const InitialData& init);
  explicit Simulation(SchemeConfig cfg);
  ~Simulation();

  const SchemeConfig& config() const { return cfg_; }
  const ReferenceMesh& mesh() const { return *mesh_; }
  const SurfaceOperators& surface() const { return *ops_; }
  const FluidSolver& fluid() const { return *fluid_; }
  const EnergyEvaluator& energy() const { return *energy_; }
  const SimulationState& state() const { return state_; }
  /// Geometry of the last completed step (eta^k, eta^{k-1}).
  const AleGeometry* geometry() const { return geom_.get(); }
  const EnergyLedger& ledger() const { return *ledger_; }
  int num_steps() const { return cfg_.num_steps(); }
  bool finished() const { return state_.k >= num_steps(); }

  /// One Step1 -> Step2 cycle. Errors are rethrown with the step index.
  StepRecord advance();

  using Observer = std::function<void(const Simulation&, const StepRecord&)>;
  std::vector<StepRecord> run(const Observer& observer = {});

private:
  SchemeConfig cfg_;
  std::unique_ptr<ReferenceMesh> mesh_;
  std::unique_ptr<SurfaceOperators> ops_;
  std::unique_ptr<FluidSolver> fluid_;
  std::unique_ptr<Step2Solver> structure_;
  std::unique_ptr<EnergyEvaluator> energy_;
  std::unique_ptr<EnergyLedger> ledger_;
  std::unique_ptr<AleGeometry> geom_;
  SimulationState state_;
};

}  // namespace fsi
