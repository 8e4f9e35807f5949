#include "fsi/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iomanip>
#include <mutex>
#include <ostream>

#include "fsi/output.hpp"

namespace fsi {

namespace {

std::mutex log_mutex;

template <class... Args>
void log_line(const RunOptions& opts, const char* fmt, Args... args) {
  if (!opts.log) return;
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  std::lock_guard lock(log_mutex);
  *opts.log << buf << '\n' << std::flush;
}

std::string snapshot_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_t%.4f.vtk", t);
  return buf;
}

}  // namespace

Experiment1Result run_experiment1(const RunConfig& cfg, const RunOptions& opts) {
  Experiment1Result res;
  Simulation sim(cfg.scheme);
  res.initial = sim.ledger().initial();
  const double tau = cfg.scheme.tau;
  const double t_off = cfg.scheme.forcing.switch_off;
  std::vector<bool> taken(cfg.experiment.snapshot_times.size(), false);
  double best01 = 1e300;
  double best02 = 1e300;
  double prev_e = res.initial.E;
  double e_scale = std::max(res.initial.E, 0.0);

  if (opts.write_files && !cfg.experiment.snapshot_times.empty()) {
    for (size_t i = 0; i < taken.size(); ++i) {
      if (std::abs(cfg.experiment.snapshot_times[i]) < 0.5 * tau) {
        const auto path = opts.out_dir / snapshot_name(0.0);
        write_vtk(path, sim.mesh(), sim.state().eta_prev.values, sim.state().u);
        res.snapshots.push_back(path);
        taken[i] = true;
      }
    }
  }

  sim.run([&](const Simulation& s, const StepRecord& r) {
    const double t = r.energy.t;
    res.steps.push_back(r);
    e_scale = std::max(e_scale, r.energy.E);
    if (t > t_off * (1.0 + 1e-12) && r.energy.E > prev_e + 1e-12 * e_scale) {
      res.energy_nonincreasing_after_force = false;
    }
    prev_e = r.energy.E;
    if (std::abs(t - 0.1) < best01) { best01 = std::abs(t - 0.1); res.deflection_at_01 = r.max_abs_eta_dev; }
    if (std::abs(t - 0.2) < best02) { best02 = std::abs(t - 0.2); res.deflection_at_02 = r.max_abs_eta_dev; }
    if (r.divergence_residual >= 0.0) {
      res.max_divergence_ratio =
          std::max(res.max_divergence_ratio, r.divergence_residual / std::max(r.velocity_norm, 1e-300));
    }
    if (opts.write_files) {
      bool snap = cfg.experiment.vtk_every > 0 && s.state().k % cfg.experiment.vtk_every == 0;
      for (size_t i = 0; i < taken.size(); ++i) {
        if (!taken[i] && std::abs(cfg.experiment.snapshot_times[i] - t) < 0.5 * tau) {
          taken[i] = true;
          snap = true;
        }
      }
      if (snap) {
        const auto path = opts.out_dir / snapshot_name(t);
        write_vtk(path, s.mesh(), s.state().eta_prev.values, s.state().u);
        res.snapshots.push_back(path);
      }
    }
    if (s.state().k % 50 == 0 || s.finished()) {
      log_line(opts, "step %d t=%.4f E=%.6e max|eta-1|=%.4e", s.state().k, t, r.energy.E,
               r.max_abs_eta_dev);
    }
  });

  if (opts.write_files) {
    std::vector<EnergyRecord> rows;
    for (const auto& r : res.steps) rows.push_back(r.energy);
    write_energy_csv(opts.out_dir / "energy.csv", rows, cfg.source);
  }
  return res;
}

bool AuditResult::passed() const {
  for (const auto& r : runs) {
    if (!r.identity_ok || !r.decay_ok) return false;
  }
  return !runs.empty();
}

AuditResult run_energy_audit(const RunConfig& cfg, const RunOptions& opts) {
  AuditResult out;
  const auto& e = cfg.experiment;
  for (size_t i = 0; i < e.audit_nx.size(); ++i) {
    SchemeConfig sc = cfg.scheme;
    sc.nx = e.audit_nx[i];
    sc.ny = e.audit_ny[i];
    sc.forcing.kind = ForcingKind::none;
    if (sc.initial == InitialKind::rest) sc.initial = InitialKind::cosine;
    Simulation sim(sc);
    AuditRun run;
    run.nx = sc.nx;
    run.ny = sc.ny;
    run.initial = sim.ledger().initial();
    double prev = run.initial.E + run.initial.D1;
    sim.run([&](const Simulation& s, const StepRecord& r) {
      run.steps.push_back(r);
      run.max_identity_residual = std::max(run.max_identity_residual, r.energy.identity_residual);
      const double cur = r.energy.E + r.energy.D1;
      run.max_decay_violation = std::max(run.max_decay_violation, cur - prev);
      prev = cur;
      run.max_noslip_ratio = std::max(
          run.max_noslip_ratio, r.noslip_residual / (1.0 + s.state().xi.values.cwiseAbs().maxCoeff()));
    });
    const double bound = e.audit_tolerance * std::max(run.initial.E, 1.0);
    run.identity_ok = run.max_identity_residual <= bound;
    run.decay_ok = run.max_decay_violation <= 1e-12;
    log_line(opts, "audit nx=%d ny=%d: E0=%.6e max identity residual=%.3e (bound %.1e) decay %s",
             run.nx, run.ny, run.initial.E, run.max_identity_residual, bound,
             run.decay_ok ? "ok" : "VIOLATED");
    if (opts.write_files) {
      std::vector<EnergyRecord> rows;
      for (const auto& r : run.steps) rows.push_back(r.energy);
      write_energy_csv(opts.out_dir / ("energy_nx" + std::to_string(run.nx) + ".csv"), rows,
                       cfg.source);
    }
    out.runs.push_back(std::move(run));
  }
  return out;
}

namespace {

/// Advances `ref` to the end and every run in lockstep with it.
std::vector<ErrorRecord> lockstep(Simulation& ref, std::vector<std::unique_ptr<Simulation>>& runs,
                                  const RunOptions& opts, const char* axis) {
  std::vector<std::unique_ptr<ErrorAccumulator>> acc;
  const QuadratureRule quad = quad_rule_triangle(ref.config().quad_degree);
  for (auto& r : runs) {
    acc.push_back(std::make_unique<ErrorAccumulator>(r->mesh(), r->config().tau, ref.mesh(),
                                                     ref.config().tau, quad));
  }
  while (!ref.finished()) {
    ref.advance();
    for (size_t i = 0; i < runs.size(); ++i) {
      if (ref.state().k % acc[i]->ratio() != 0) continue;
      runs[i]->advance();
      acc[i]->add(runs[i]->state().slice(), ref.state().slice());
    }
    if (ref.state().k % 100 == 0) {
      log_line(opts, "%s ladder: reference step %d / %d", axis, ref.state().k, ref.num_steps());
    }
  }
  std::vector<ErrorRecord> out;
  for (const auto& a : acc) out.push_back(a->result());
  return out;
}

std::vector<RateSummary> ladder_rates(const std::vector<ErrorRecord>& records, bool by_h) {
  std::vector<RateSummary> out;
  if (records.size() < 2) return out;
  std::vector<double> params;
  for (const auto& r : records) params.push_back(by_h ? r.h : r.tau);
  for (int n = 0; n < ErrorRecord::num_norms; ++n) {
    std::vector<double> errs;
    for (const auto& r : records) errs.push_back(r.norm(n));
    out.push_back(convergence_rates(params, errs));
  }
  return out;
}

}  // namespace

LadderResult run_spatial_ladder(const RunConfig& cfg, const RunOptions& opts) {
  const auto& e = cfg.experiment;
  SchemeConfig base = cfg.scheme;
  base.tau = e.spatial_tau;
  SchemeConfig rc = base;
  rc.nx = e.reference_nx;
  rc.ny = e.reference_ny;
  Simulation ref(rc);
  std::vector<std::unique_ptr<Simulation>> runs;
  for (size_t i = 0; i < e.spatial_nx.size(); ++i) {
    SchemeConfig c = base;
    c.nx = e.spatial_nx[i];
    c.ny = e.spatial_ny[i];
    runs.push_back(std::make_unique<Simulation>(c));
  }
  LadderResult out;
  out.axis = "h";
  out.records = lockstep(ref, runs, opts, "spatial");
  out.rates = ladder_rates(out.records, true);
  return out;
}

LadderResult run_temporal_ladder(const RunConfig& cfg, const RunOptions& opts) {
  const auto& e = cfg.experiment;
  SchemeConfig base = cfg.scheme;
  base.nx = e.temporal_nx;
  base.ny = e.temporal_ny;
  SchemeConfig rc = base;
  rc.tau = e.reference_tau;
  Simulation ref(rc);
  std::vector<std::unique_ptr<Simulation>> runs;
  for (double tau : e.temporal_tau) {
    SchemeConfig c = base;
    c.tau = tau;
    runs.push_back(std::make_unique<Simulation>(c));
  }
  LadderResult out;
  out.axis = "tau";
  out.records = lockstep(ref, runs, opts, "temporal");
  out.rates = ladder_rates(out.records, false);
  return out;
}

Experiment2Result run_experiment2(const RunConfig& cfg, const RunOptions& opts) {
  Experiment2Result res;
  if (opts.threads > 1) {
    auto spatial = std::async(std::launch::async, [&] { return run_spatial_ladder(cfg, opts); });
    res.temporal = run_temporal_ladder(cfg, opts);
    res.spatial = spatial.get();
  } else {
    res.temporal = run_temporal_ladder(cfg, opts);
    res.spatial = run_spatial_ladder(cfg, opts);
  }
  if (opts.write_files) {
    write_error_csv(opts.out_dir / "errors_space.csv", res.spatial.records, cfg.source);
    write_error_csv(opts.out_dir / "errors_time.csv", res.temporal.records, cfg.source);
    std::ofstream table(opts.out_dir / "convergence.txt");
    write_convergence_table(table, res.spatial);
    table << '\n';
    write_convergence_table(table, res.temporal);
  }
  return res;
}

void write_convergence_table(std::ostream& out, const LadderResult& ladder) {
  const int w = 14;
  out << "convergence in " << ladder.axis << '\n';
  out << std::setw(w) << "h" << std::setw(w) << "tau";
  for (int n = 0; n < ErrorRecord::num_norms; ++n) out << std::setw(w) << ErrorRecord::norm_name(n);
  out << '\n';
  out << std::scientific << std::setprecision(4);
  for (size_t i = 0; i < ladder.records.size(); ++i) {
    const auto& r = ladder.records[i];
    out << std::setw(w) << r.h << std::setw(w) << r.tau;
    for (int n = 0; n < ErrorRecord::num_norms; ++n) out << std::setw(w) << r.norm(n);
    out << '\n';
    if (i + 1 < ladder.records.size() && !ladder.rates.empty()) {
      out << std::setw(2 * w) << "rate";
      out << std::fixed << std::setprecision(3);
      for (int n = 0; n < ErrorRecord::num_norms; ++n) {
        const auto& rate = ladder.rates[n].pair_rates[i];
        if (rate) {
          out << std::setw(w) << *rate;
        } else {
          out << std::setw(w) << "-";
        }
      }
      out << std::scientific << std::setprecision(4) << '\n';
    }
  }
  if (!ladder.rates.empty()) {
    out << std::setw(2 * w) << "slope" << std::fixed << std::setprecision(3);
    for (int n = 0; n < ErrorRecord::num_norms; ++n) {
      const auto& s = ladder.rates[n].slope;
      if (s) {
        out << std::setw(w) << *s;
      } else {
        out << std::setw(w) << "-";
      }
    }
    out << '\n';
  }
  out << std::defaultfloat;
}

}  // namespace fsi
