#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fsi/scheme.hpp"

namespace fsi {

enum class ExperimentKind { single_run, energy_audit, convergence_matrix };

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::single_run;

  // single run
  std::vector<double> snapshot_times;
  int vtk_every = 0;

  // energy audit: one unforced run per entry, ny = nx / 2 unless given
  std::vector<int> audit_nx{10, 20, 40};
  std::vector<int> audit_ny{5, 10, 20};
  double audit_tolerance = 1e-9;

  // convergence matrix
  std::vector<int> spatial_nx{10, 20, 40};
  std::vector<int> spatial_ny{5, 10, 20};
  double spatial_tau = 5e-4;
  int reference_nx = 160;
  int reference_ny = 80;
  std::vector<double> temporal_tau{5e-3, 2.5e-3, 1.25e-3};
  int temporal_nx = 40;
  int temporal_ny = 20;
  double reference_tau = 3.125e-4;

  void validate() const;
};

struct RunConfig {
  SchemeConfig scheme;
  ExperimentSpec experiment;
  std::string source;  ///< the text the config was read from
};

/// Flat `key = value` documents: numbers, quoted strings, booleans and
/// one-line arrays; `#` starts a comment. Unknown keys are rejected.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");
RunConfig parse_config(const std::filesystem::path& path);

const char* to_string(ExperimentKind kind);

}  // namespace fsi
