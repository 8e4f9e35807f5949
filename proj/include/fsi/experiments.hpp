#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fsi/config.hpp"
#include "fsi/diagnostics.hpp"
#include "fsi/scheme.hpp"

namespace fsi {

struct RunOptions {
  std::filesystem::path out_dir = "out";
  int threads = 1;
  bool write_files = true;
  std::ostream* log = nullptr;
};

struct Experiment1Result {
  std::vector<StepRecord> steps;
  EnergyRecord initial;
  std::vector<std::filesystem::path> snapshots;
  double deflection_at_01 = 0.0;  ///< max |eta - 1| at the step closest to t = 0.1
  double deflection_at_02 = 0.0;
  /// E^k <= E^{k-1} for every step with t^k > switch-off (relative slack 1e-12)
  bool energy_nonincreasing_after_force = true;
  double max_divergence_ratio = 0.0;  ///< max divergence residual / max(||u||, tiny)
};

Experiment1Result run_experiment1(const RunConfig& cfg, const RunOptions& opts = {});

struct AuditRun {
  int nx = 0;
  int ny = 0;
  EnergyRecord initial;
  std::vector<StepRecord> steps;
  double max_identity_residual = 0.0;
  double max_decay_violation = 0.0;  ///< max over m of (E+D1)^m - (E+D1)^{m-1}, clipped at 0
  double max_noslip_ratio = 0.0;     ///< residual / (1 + ||xi||_inf)
  bool identity_ok = false;
  bool decay_ok = false;
};

struct AuditResult {
  std::vector<AuditRun> runs;
  bool passed() const;
};

/// Unforced runs on each audit mesh with the cosine initial height.
AuditResult run_energy_audit(const RunConfig& cfg, const RunOptions& opts = {});

struct LadderResult {
  std::string axis;  ///< "h" or "tau"
  std::vector<ErrorRecord> records;
  std::vector<RateSummary> rates;  ///< one per norm
};

struct Experiment2Result {
  LadderResult spatial;
  LadderResult temporal;
};

/// Runs every ladder cell in lockstep with its reference and streams the
/// error norms, so reference trajectories are never stored.
LadderResult run_spatial_ladder(const RunConfig& cfg, const RunOptions& opts = {});
LadderResult run_temporal_ladder(const RunConfig& cfg, const RunOptions& opts = {});
Experiment2Result run_experiment2(const RunConfig& cfg, const RunOptions& opts = {});

/// Aligned text table with per-pair rates and the least-squares slope.
void write_convergence_table(std::ostream& out, const LadderResult& ladder);

}  // namespace fsi
