#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fsi/ale.hpp"
#include "fsi/diagnostics.hpp"
#include "fsi/fluid.hpp"
#include "fsi/mesh.hpp"

namespace fsi {

/// Each line of `source` written as a `# ` comment.
void write_comment_block(std::ostream& out, const std::string& source);

void write_energy_csv(std::ostream& out, const std::vector<EnergyRecord>& records,
                      const std::string& config_source = {});
void write_energy_csv(const std::filesystem::path& path, const std::vector<EnergyRecord>& records,
                      const std::string& config_source = {});
void write_error_csv(std::ostream& out, const std::vector<ErrorRecord>& records,
                     const std::string& config_source = {});
void write_error_csv(const std::filesystem::path& path, const std::vector<ErrorRecord>& records,
                     const std::string& config_source = {});

/// Comment lines are skipped; throws ConfigError on a malformed row.
std::vector<EnergyRecord> read_energy_csv(std::istream& in);
std::vector<ErrorRecord> read_error_csv(std::istream& in);

/// Legacy-VTK ASCII unstructured grid of the deformed mesh. The periodic
/// seam is unaliased so the right column carries its own points.
void write_vtk(std::ostream& out, const ReferenceMesh& mesh, const Eigen::VectorXd& eta,
               const FluidState& u, const std::string& title = "fsi");
void write_vtk(const std::filesystem::path& path, const ReferenceMesh& mesh,
               const Eigen::VectorXd& eta, const FluidState& u, const std::string& title = "fsi");

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace fsi
