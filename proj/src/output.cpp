#include "fsi/output.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fsi/errors.hpp"

namespace fsi {

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_comment_block(std::ostream& out, const std::string& source) {
  if (source.empty()) return;
  std::istringstream in(source);
  std::string line;
  while (std::getline(in, line)) out << "# " << line << '\n';
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::vector<double>> read_rows(std::istream& in, const std::string& header) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool seen_header = false;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      if (line != header) throw ConfigError("csv line " + std::to_string(n) + ": unexpected header");
      seen_header = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ConfigError("csv line " + std::to_string(n) + ": bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (!seen_header) throw ConfigError("csv: missing header");
  return rows;
}

const char* energy_header = "k,t,E,visc,D1,D2,identity_residual";
const char* error_header =
    "h,tau,eu_LiL2,exi_LiL2,eeta_LiL2,gradeeta_LiL2,ezeta_LiL2,gradeu_L2L2";

}  // namespace

void write_energy_csv(std::ostream& out, const std::vector<EnergyRecord>& records,
                      const std::string& config_source) {
  write_comment_block(out, config_source);
  out << energy_header << '\n';
  for (const auto& r : records) {
    out << r.k << ',' << format_double(r.t) << ',' << format_double(r.E) << ','
        << format_double(r.visc) << ',' << format_double(r.D1) << ',' << format_double(r.D2) << ','
        << format_double(r.identity_residual) << '\n';
  }
}

void write_energy_csv(const std::filesystem::path& path, const std::vector<EnergyRecord>& records,
                      const std::string& config_source) {
  auto out = open_out(path);
  write_energy_csv(out, records, config_source);
  finish(out, path);
}

void write_error_csv(std::ostream& out, const std::vector<ErrorRecord>& records,
                     const std::string& config_source) {
  write_comment_block(out, config_source);
  out << error_header << '\n';
  for (const auto& r : records) {
    out << format_double(r.h) << ',' << format_double(r.tau);
    for (int i = 0; i < ErrorRecord::num_norms; ++i) out << ',' << format_double(r.norm(i));
    out << '\n';
  }
}

void write_error_csv(const std::filesystem::path& path, const std::vector<ErrorRecord>& records,
                     const std::string& config_source) {
  auto out = open_out(path);
  write_error_csv(out, records, config_source);
  finish(out, path);
}

std::vector<EnergyRecord> read_energy_csv(std::istream& in) {
  std::vector<EnergyRecord> out;
  for (const auto& row : read_rows(in, energy_header)) {
    if (row.size() != 7) throw ConfigError("energy csv: expected 7 columns");
    out.push_back({static_cast<int>(row[0]), row[1], row[2], row[3], row[4], row[5], row[6]});
  }
  return out;
}

std::vector<ErrorRecord> read_error_csv(std::istream& in) {
  std::vector<ErrorRecord> out;
  for (const auto& row : read_rows(in, error_header)) {
    if (row.size() != 8) throw ConfigError("error csv: expected 8 columns");
    out.push_back({row[0], row[1], row[2], row[3], row[4], row[5], row[6], row[7]});
  }
  return out;
}

void write_vtk(std::ostream& out, const ReferenceMesh& mesh, const Eigen::VectorXd& eta,
               const FluidState& u, const std::string& title) {
  if (eta.size() != mesh.columns()) throw ConfigError("vtk: eta does not match the mesh");
  const int cols = mesh.nx() + 1;
  const int rows = mesh.ny() + 1;
  const int npts = cols * rows;
  auto point = [&](int i, int j) { return j * cols + i; };
  auto source = [&](int i, int j) { return mesh.vertex_index(i, j); };

  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << npts << " double\n";
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      const double h = eta[i % mesh.columns()];
      out << format_double(i * mesh.dx()) << ' ' << format_double(j * mesh.dy() * h) << " 0\n";
    }
  }
  const int ncells = mesh.num_cells();
  out << "CELLS " << ncells << ' ' << 4 * ncells << '\n';
  for (int s = 0; s < ncells / 2; ++s) {
    const int i = s % mesh.nx();
    const int j = s / mesh.nx();
    out << "3 " << point(i, j) << ' ' << point(i + 1, j) << ' ' << point(i + 1, j + 1) << '\n';
    out << "3 " << point(i, j) << ' ' << point(i + 1, j + 1) << ' ' << point(i, j + 1) << '\n';
  }
  out << "CELL_TYPES " << ncells << '\n';
  for (int c = 0; c < ncells; ++c) out << "5\n";

  out << "POINT_DATA " << npts << '\n';
  out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) out << format_double(u.pressure[source(i, j)]) << '\n';
  }
  out << "VECTORS velocity double\n";
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      const int v = source(i, j);
      out << format_double(u.velocity[2 * v]) << ' ' << format_double(u.velocity[2 * v + 1])
          << " 0\n";
    }
  }
  out << "SCALARS eta double 1\nLOOKUP_TABLE default\n";
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      out << format_double(j == mesh.ny() ? eta[i % mesh.columns()] : 0.0) << '\n';
    }
  }
}

void write_vtk(const std::filesystem::path& path, const ReferenceMesh& mesh,
               const Eigen::VectorXd& eta, const FluidState& u, const std::string& title) {
  auto out = open_out(path);
  write_vtk(out, mesh, eta, u, title);
  finish(out, path);
}

}  // namespace fsi
