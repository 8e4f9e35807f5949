#pragma once

#include <memory>
#include <vector>

#include <Eigen/Sparse>

namespace fsi {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

enum class SolverKind { direct, iterative };

struct SolverOptions {
  SolverKind kind = SolverKind::direct;
  /// Relative residual bound ||Ax - b|| / ||b|| checked after every solve.
  double tol = 1e-12;
  int max_iterations = 20000;
};

/// Prescribed values for a subset of dofs and the numbering of the rest.
class DofConstraints {
public:
  DofConstraints() = default;
  explicit DofConstraints(int num_dofs);

  void fix(int dof, double value = 0.0);
  /// Builds the free-dof numbering; call once after all fix() calls.
  void finalize();

  int num_dofs() const { return static_cast<int>(reduced_.size()); }
  int num_free() const { return static_cast<int>(free_.size()); }
  bool is_fixed(int dof) const { return fixed_[dof]; }
  double value(int dof) const { return value_[dof]; }
  /// Reduced index of a free dof, -1 for a constrained one.
  int reduced(int dof) const { return reduced_[dof]; }
  const std::vector<int>& free_dofs() const { return free_; }

  Eigen::VectorXd expand(const Eigen::VectorXd& reduced_values) const;
  Eigen::VectorXd restrict(const Eigen::VectorXd& full_values) const;

private:
  std::vector<char> fixed_;
  std::vector<double> value_;
  std::vector<int> reduced_;
  std::vector<int> free_;
};

/// Linear system posed on the free dofs, with the bookkeeping needed to map
/// a reduced solution back to the full dof range.
struct SparseSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  DofConstraints constraints;
};

/// Symmetric row/column elimination: constrained columns move to the rhs
/// times their prescribed value, constrained rows are dropped.
SparseSystem eliminate_constraints(const SparseMatrix& full_matrix, const Eigen::VectorXd& full_rhs,
                                   const DofConstraints& constraints);

/// Reusable solver. The direct path keeps its symbolic analysis while the
/// sparsity pattern stays the same.
class LinearSolver {
public:
  explicit LinearSolver(SolverOptions options = {});
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  /// Throws SolverError on factorization failure or when the relative
  /// residual exceeds options().tol.
  Eigen::VectorXd solve(const SparseMatrix& a, const Eigen::VectorXd& b);

  const SolverOptions& options() const { return options_; }
  double last_residual() const { return last_residual_; }
  int last_iterations() const { return last_iterations_; }

private:
  struct Impl;
  SolverOptions options_;
  std::unique_ptr<Impl> impl_;
  double last_residual_ = 0.0;
  int last_iterations_ = 0;
};

/// Solves a constrained system and returns the full-length coefficient vector.
Eigen::VectorXd solve_sparse(const SparseSystem& sys, const SolverOptions& options = {});

/// Relative residual ||Ax - b|| / ||b|| (absolute when b = 0).
double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

/// First row or column with no stored nonzero, -1 if none.
int find_empty_line(const SparseMatrix& a);

}  // namespace fsi
