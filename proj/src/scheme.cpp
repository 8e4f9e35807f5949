#include "fsi/scheme.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fsi/errors.hpp"

namespace fsi {

bool Forcing::active(double t) const {
  return kind == ForcingKind::pulse && t <= switch_off * (1.0 + 1e-12);
}

double Forcing::operator()(double x1, double t) const {
  if (!active(t)) return 0.0;
  return amplitude * t * std::sin(2.0 * std::numbers::pi * x1);
}

void SchemeConfig::validate() const {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(key) + ": must be a positive finite number");
    }
  };
  positive(physics.mu, "mu");
  positive(physics.rho_f, "rho_f");
  positive(physics.rho_s, "rho_s");
  positive(physics.gamma1, "gamma1");
  positive(physics.gamma2, "gamma2");
  positive(length, "length");
  positive(tau, "tau");
  positive(final_time, "final_time");
  positive(eta_floor, "eta_floor");
  positive(solver.tol, "solver_tol");
  if (nx < 2) throw ConfigError("nx: must be at least 2");
  if (ny < 1) throw ConfigError("ny: must be at least 1");
  if (quad_degree < 1 || quad_degree > 8) throw ConfigError("quad_degree: must be in 1..8");
  const double steps = final_time / tau;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
    throw ConfigError("final_time: must be an integer multiple of tau");
  }
  if (forcing.kind == ForcingKind::pulse && !std::isfinite(forcing.amplitude)) {
    throw ConfigError("force_amplitude: must be finite");
  }
  if (initial == InitialKind::cosine && !(std::abs(initial_amplitude) < 1.0)) {
    throw ConfigError("initial_amplitude: must satisfy |a| < 1");
  }
}

int SchemeConfig::num_steps() const { return static_cast<int>(std::lround(final_time / tau)); }

InitialData InitialData::rest(const ReferenceMesh& mesh) {
  const FluidDofMap dofs(mesh);
  return {Eigen::VectorXd::Ones(mesh.columns()), Eigen::VectorXd::Zero(mesh.columns()),
          Eigen::VectorXd::Zero(dofs.num_velocity())};
}

InitialData InitialData::cosine(const ReferenceMesh& mesh, double amplitude) {
  InitialData d = rest(mesh);
  for (int i = 0; i < mesh.columns(); ++i) {
    const double x = i * mesh.dx();
    d.eta0[i] = 1.0 + amplitude * std::cos(2.0 * std::numbers::pi * x / mesh.length());
  }
  return d;
}

InitialData InitialData::from_config(const SchemeConfig& cfg, const ReferenceMesh& mesh) {
  return cfg.initial == InitialKind::cosine ? cosine(mesh, cfg.initial_amplitude) : rest(mesh);
}

Simulation::Simulation(SchemeConfig cfg) : Simulation(cfg, [&] {
  cfg.validate();
  return InitialData::from_config(cfg, build_structured_mesh(cfg.length, cfg.nx, cfg.ny, cfg.lateral));
}()) {}

Simulation::Simulation(SchemeConfig cfg, const InitialData& init) : cfg_(std::move(cfg)) {
  cfg_.validate();
  mesh_ = std::make_unique<ReferenceMesh>(
      build_structured_mesh(cfg_.length, cfg_.nx, cfg_.ny, cfg_.lateral));
  ops_ = std::make_unique<SurfaceOperators>(surface_trace(*mesh_));
  const QuadratureRule quad = quad_rule_triangle(cfg_.quad_degree);
  fluid_ = std::make_unique<FluidSolver>(*mesh_, *ops_, cfg_.physics, cfg_.tau, quad, cfg_.solver,
                                         cfg_.top);
  structure_ = std::make_unique<Step2Solver>(*ops_, cfg_.physics.shell(), cfg_.tau, cfg_.eta_floor);
  energy_ = std::make_unique<EnergyEvaluator>(*mesh_, *ops_, cfg_.physics, cfg_.tau, quad);

  const int ns = mesh_->columns();
  const FluidDofMap& dofs = fluid_->dofs();
  if (init.eta0.size() != ns || init.xi0.size() != ns || init.u0.size() != dofs.num_velocity()) {
    throw ConfigError("initial data: size does not match the mesh");
  }
  check_height_floor(init.eta0, cfg_.eta_floor);

  SimulationState& s = state_;
  s.u = {init.u0, Eigen::VectorXd::Zero(dofs.num_pressure())};
  s.u_prev = s.u;
  s.xi = {FieldKind::xi, ops_->restrict_to_space(init.xi0)};
  s.xi_prev = s.xi;
  s.eta_prev = {FieldKind::eta, init.eta0};
  s.eta = predict_initial(s.eta_prev, s.xi, cfg_.tau, cfg_.eta_floor);
  s.zeta_prev = discrete_laplace(*ops_, s.eta_prev);
  s.zeta = discrete_laplace(*ops_, s.eta);

  const AleGeometry g0(*mesh_, init.eta0, init.eta0, cfg_.tau);
  const double e0 = energy_->energy(s.u.velocity, g0, s.xi, s.eta, s.zeta);
  const double d10 = energy_->dissipation_d1(s.xi, s.zeta);
  ledger_ = std::make_unique<EnergyLedger>(cfg_.tau, e0, d10);
}

Simulation::~Simulation() = default;

StepRecord Simulation::advance() {
  SimulationState& s = state_;
  const int k = s.k + 1;
  const double tau = cfg_.tau;
  const double t = k * tau;
  try {
    auto geom = std::make_unique<AleGeometry>(
        evaluate_geometry(s.eta.values, s.eta_prev.values, tau, *mesh_, cfg_.eta_floor));

    // eta^k - eta^{k-1} = tau xi^{k-1} up to the rounding of one fma
    const double eta_scale = std::max(s.eta.values.cwiseAbs().maxCoeff(), 1.0);
    const double xi_scale = s.xi.values.size() ? s.xi.values.cwiseAbs().maxCoeff() : 0.0;
    const double dtj_tol = 4.0 * std::numeric_limits<double>::epsilon() * eta_scale / tau +
                           1e-14 * xi_scale;
    for (int i = 0; i < s.eta.size(); ++i) {
      const double dtj = (s.eta.values[i] - s.eta_prev.values[i]) / tau;
      if (std::abs(dtj - s.xi.values[i]) > dtj_tol) {
        throw SolverError("mesh velocity does not match the structure velocity at node " +
                          std::to_string(i));
      }
    }

    Eigen::VectorXd load;
    const double t_force = cfg_.sampling == ForceSampling::right ? t : t - tau;
    const bool forced = cfg_.forcing.active(t_force);
    if (forced) {
      load = ops_->load_vector([&](double x) { return cfg_.forcing(x, t_force); });
    }
    const Step1Inputs in{s.u, s.xi, *geom, s.eta, s.zeta, forced ? &load : nullptr};
    FluidState u_new = fluid_->solve(in);

    const SurfaceField u_top = top_normal_trace(ops_->surface(), fluid_->dofs(), u_new);
    Step2Result st = structure_->solve(u_top, s.eta, s.zeta);

    StepRecord rec;
    rec.noslip_residual = modified_noslip_residual(*ops_, cfg_.physics.shell(), tau, u_top, st.xi);
    if (cfg_.check_divergence) {
      rec.divergence_residual =
          divergence_residual(u_new, *geom, fluid_->dofs(), fluid_->quadrature());
    }
    rec.solver_residual = fluid_->last_residual();

    const double E = energy_->energy(u_new.velocity, *geom, st.xi, st.eta_next, st.zeta_next);
    const double visc = energy_->viscous(u_new.velocity, *geom);
    const double d1 = energy_->dissipation_d1(st.xi, st.zeta_next);
    const double d2 = energy_->dissipation_d2(u_new.velocity, s.u.velocity, *geom, st.xi, s.xi,
                                              st.zeta_next, s.zeta);
    rec.energy = ledger_->add(k, t, E, visc, d1, d2);

    s.u_prev = std::move(s.u);
    s.u = std::move(u_new);
    s.xi_prev = std::move(s.xi);
    s.xi = std::move(st.xi);
    s.eta_prev = std::move(s.eta);
    s.eta = std::move(st.eta_next);
    s.zeta_prev = std::move(s.zeta);
    s.zeta = std::move(st.zeta_next);
    s.k = k;
    s.t = t;
    geom_ = std::move(geom);

    rec.velocity_norm = s.u.velocity.norm();
    rec.max_abs_xi = s.xi.values.cwiseAbs().maxCoeff();
    rec.max_abs_eta_dev = (s.eta_prev.values.array() - 1.0).abs().maxCoeff();
    return rec;
  } catch (const GeometryError& e) {
    throw GeometryError("step " + std::to_string(k) + ": " + e.what(), e.node(), e.value());
  } catch (const SolverError& e) {
    throw SolverError("step " + std::to_string(k) + ": " + e.what(), e.dof());
  }
}

std::vector<StepRecord> Simulation::run(const Observer& observer) {
  std::vector<StepRecord> out;
  out.reserve(num_steps() - state_.k);
  while (!finished()) {
    out.push_back(advance());
    if (observer) observer(*this, out.back());
  }
  return out;
}

}  // namespace fsi
