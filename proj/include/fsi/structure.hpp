#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "fsi/mesh.hpp"
#include "fsi/sparse.hpp"

namespace fsi {

enum class FieldKind { eta, xi, zeta, delta_xi, generic };

/// P1 coefficients on the interface nodes.
struct SurfaceField {
  FieldKind kind = FieldKind::generic;
  Eigen::VectorXd values;

  SurfaceField() = default;
  SurfaceField(FieldKind k, Eigen::VectorXd v) : kind(k), values(std::move(v)) {}

  int size() const { return static_cast<int>(values.size()); }
};

struct ShellParams {
  double rho_s = 1.0;
  double gamma1 = 0.1;
  double gamma2 = 0.1;
};

/// Mass and stiffness matrices of the interface P1 space.
///
/// In clamped mode the structure space vanishes at both ends: increments,
/// velocities and the discrete Laplacian live on the interior nodes, while a
/// height field may carry any boundary value.
class SurfaceOperators {
public:
  explicit SurfaceOperators(const SurfaceMesh& surface);

  const SurfaceMesh& surface() const { return surface_; }
  int num_nodes() const { return surface_.num_nodes(); }
  const SparseMatrix& mass() const { return mass_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  const std::vector<int>& free_nodes() const { return free_; }
  bool is_free(int node) const { return free_index_[node] >= 0; }
  int free_index(int node) const { return free_index_[node]; }

  /// Discrete second derivative: w in the structure space with
  /// int w psi = -int v' psi' for every psi in the structure space.
  Eigen::VectorXd second_derivative(const Eigen::VectorXd& v) const;
  /// Solves M w = r on the free nodes (r given on all nodes), zero elsewhere.
  Eigen::VectorXd solve_mass(const Eigen::VectorXd& r) const;

  double l2_norm_sq(const Eigen::VectorXd& v) const { return v.dot(mass_ * v); }
  double h1_seminorm_sq(const Eigen::VectorXd& v) const { return v.dot(stiffness_ * v); }
  double integral(const Eigen::VectorXd& v) const { return (mass_ * v).sum(); }

  /// int g psi_i for every node, Gauss rule with `points` per segment.
  Eigen::VectorXd load_vector(const std::function<double(double)>& g, int points = 6) const;
  /// Zeroes the constrained (clamped end) entries.
  Eigen::VectorXd restrict_to_space(Eigen::VectorXd v) const;

private:
  SurfaceMesh surface_;
  SparseMatrix mass_;
  SparseMatrix stiffness_;
  std::vector<int> free_;
  std::vector<int> free_index_;
  SparseMatrix mass_free_;
  Eigen::SimplicialLDLT<SparseMatrix> mass_factor_;
};

/// zeta = -d2_h eta: the P1 field with int zeta psi = int eta' psi'.
SurfaceField discrete_laplace(const SurfaceOperators& ops, const SurfaceField& eta);

/// int (gamma1 eta' + gamma2 zeta') psi'.
double elastic_form_apply(const SurfaceOperators& ops, const ShellParams& p,
                          const SurfaceField& eta, const SurfaceField& zeta,
                          const SurfaceField& psi);

/// d2_h (gamma2 d2_h xi - gamma1 xi).
SurfaceField delta_xi(const SurfaceOperators& ops, const ShellParams& p, const SurfaceField& xi);

/// eta1 = eta0 + tau xi0, node by node with a fused multiply-add.
SurfaceField predict_initial(const SurfaceField& eta0, const SurfaceField& xi0, double tau,
                             double eta_floor = 1e-6);

struct Step2Result {
  SurfaceField xi;         ///< xi^k
  SurfaceField eta_next;   ///< eta^{k+1} = eta^k + tau xi^k
  SurfaceField zeta_next;  ///< zeta^{k+1}
};

/// Structure subproblem. The coupled (xi, zeta) matrix does not depend on the
/// step, so it is assembled and factored once.
///
///   (rho_s/tau) M xi + gamma1 tau K xi + gamma2 K zeta' = (rho_s/tau) M u2 + gamma2 K zeta
///   -tau K xi + M zeta'                                  = K eta
class Step2Solver {
public:
  Step2Solver(const SurfaceOperators& ops, const ShellParams& params, double tau,
              double eta_floor = 1e-6);

  Step2Result solve(const SurfaceField& u_top, const SurfaceField& eta_k,
                    const SurfaceField& zeta_k) const;

  const SparseMatrix& matrix() const { return matrix_; }

private:
  const SurfaceOperators* ops_;
  ShellParams params_;
  double tau_;
  double eta_floor_;
  SparseMatrix matrix_;
  Eigen::SparseLU<SparseMatrix> lu_;
};

}  // namespace fsi
