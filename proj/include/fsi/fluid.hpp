#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fsi/ale.hpp"
#include "fsi/basis.hpp"
#include "fsi/dofs.hpp"
#include "fsi/mesh.hpp"
#include "fsi/quadrature.hpp"
#include "fsi/sparse.hpp"
#include "fsi/structure.hpp"

namespace fsi {

struct FluidParams {
  double mu = 0.01;
  double rho_f = 1.0;
  double rho_s = 1.0;
  double gamma1 = 0.1;
  double gamma2 = 0.1;

  ShellParams shell() const { return {rho_s, gamma1, gamma2}; }
};

/// Velocity in the full MINI numbering (vertex part then bubbles) and P1 pressure.
struct FluidState {
  Eigen::VectorXd velocity;
  Eigen::VectorXd pressure;

  static FluidState zero(const FluidDofMap& dofs);
};

/// Vertical velocity on the interface nodes (bubbles vanish on edges).
SurfaceField top_normal_trace(const SurfaceMesh& surface, const FluidDofMap& dofs,
                              const FluidState& u);

/// Term groups of the Step-1 form, used to assemble blocks in isolation.
namespace term {
inline constexpr unsigned inertia = 1u;     ///< J D_t u and the D_t J u* correction
inline constexpr unsigned convection = 2u;  ///< skew-symmetric ALE convection
inline constexpr unsigned stress = 4u;      ///< viscous part of the Cauchy stress
inline constexpr unsigned pressure = 8u;    ///< pressure/continuity coupling
inline constexpr unsigned interface = 16u;  ///< penalty, elastic load and surface force
inline constexpr unsigned all = 31u;
}  // namespace term

/// How the interface condition enters Step 1.
enum class TopCondition {
  penalty,  ///< (rho_s/tau) int (u - xi e2) . phi on the top boundary
  strong,   ///< u2 = xi^{k-1} imposed as a Dirichlet value
};

/// Data for one fluid solve. All fields refer to the same mesh.
struct Step1Inputs {
  const FluidState& u_prev;
  const SurfaceField& xi_prev;
  const AleGeometry& geom;      ///< built from eta^k and eta^{k-1}
  const SurfaceField& eta_k;
  const SurfaceField& zeta_k;
  const Eigen::VectorXd* surface_load = nullptr;  ///< int g psi_i, optional
};

/// Step-1 assembler and solver. The sparsity pattern is fixed at
/// construction; each step only rewrites values, so the symbolic
/// factorization is reused.
class FluidSolver {
public:
  FluidSolver(const ReferenceMesh& mesh, const SurfaceOperators& surface, FluidParams params,
              double tau, QuadratureRule quad, SolverOptions options = {},
              TopCondition top = TopCondition::penalty);

  /// Reduced system for the selected term groups.
  SparseSystem assemble(const Step1Inputs& in, unsigned terms = term::all) const;

  /// Throws SolverError if the system is singular even with the pressure
  /// multiplier fallback.
  FluidState solve(const Step1Inputs& in);

  const FluidDofMap& dofs() const { return dofs_; }
  const DofConstraints& constraints() const { return constraints_; }
  const QuadratureRule& quadrature() const { return quad_; }
  double last_residual() const { return solver_.last_residual(); }
  bool using_pressure_multiplier() const { return use_multiplier_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

private:
  using LocalMatrix = Eigen::Matrix<double, 11, 11>;
  using LocalVector = Eigen::Matrix<double, 11, 1>;

  /// Sparsity and scatter positions for one numbering of the unknowns.
  struct Layout {
    DofConstraints constraints;
    SparseMatrix pattern;
    std::vector<int> positions;  // ncells x 11 x 11, -1 when row or column is not free
    std::vector<int> surface_positions;
    std::vector<double> surface_mass;
    std::vector<int> top_dof;  // reduced vertical-velocity dof per surface node, -1 if fixed
  };
  /// Per-cell data to recover the bubble coefficients after a condensed solve.
  struct BubbleRecovery {
    Eigen::Matrix2d inverse;
    Eigen::Matrix<double, 2, 11> coupling;
    Eigen::Vector2d rhs;
  };

  Layout build_layout(const DofConstraints& constraints) const;
  void local_system(const Step1Inputs& in, unsigned terms, int cell, LocalMatrix& local,
                    LocalVector& rhs) const;
  /// Scatters cell systems into `layout`; with `recovery` set, bubbles are
  /// eliminated cell by cell first.
  void assemble_into(const Step1Inputs& in, unsigned terms, const Layout& layout,
                     const DofConstraints& constraints, SparseMatrix& matrix,
                     Eigen::VectorXd& rhs, std::vector<BubbleRecovery>* recovery) const;
  DofConstraints constraints_for(const Step1Inputs& in, const DofConstraints& base) const;
  Eigen::VectorXd solve_with_multiplier(const SparseMatrix& a, const Eigen::VectorXd& b,
                                        const DofConstraints& constraints);

  const ReferenceMesh* mesh_;
  const SurfaceOperators* surface_;
  FluidParams params_;
  double tau_;
  QuadratureRule quad_;
  TopCondition top_;
  FluidDofMap dofs_;
  DofConstraints constraints_;
  std::array<std::vector<P1BubbleShapes>, 2> shapes_;  // per cell orientation, per point
  std::vector<std::array<int, 11>> cell_dofs_;
  Layout full_;
  Layout condensed_;  // bubbles treated as eliminated
  SparseMatrix work_;
  std::vector<BubbleRecovery> recovery_;
  LinearSolver solver_;
  LinearSolver fallback_solver_;
  bool use_multiplier_ = false;
  std::vector<std::string> warnings_;
};

/// max over pressure hats q of |int q grad(u) : M|.
double divergence_residual(const FluidState& u, const AleGeometry& geom, const FluidDofMap& dofs,
                           const QuadratureRule& quad);

/// Velocity value and gradient of the MINI field at a point of a cell.
struct VelocitySample {
  Eigen::Vector2d value;
  Eigen::Matrix2d grad;  ///< grad(r, c) = d u_r / d x_c
};

VelocitySample sample_velocity(const Eigen::VectorXd& velocity, const FluidDofMap& dofs,
                               const std::array<int, 11>& cell_dofs, const P1BubbleShapes& s);

}  // namespace fsi
