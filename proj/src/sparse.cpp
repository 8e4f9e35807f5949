#include "fsi/sparse.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/UmfPackSupport>

#include "fsi/errors.hpp"

namespace fsi {

DofConstraints::DofConstraints(int num_dofs)
    : fixed_(num_dofs, 0), value_(num_dofs, 0.0), reduced_(num_dofs, -1) {}

void DofConstraints::fix(int dof, double value) {
  fixed_.at(dof) = 1;
  value_[dof] = value;
}

void DofConstraints::finalize() {
  free_.clear();
  for (int d = 0; d < num_dofs(); ++d) {
    if (fixed_[d]) {
      reduced_[d] = -1;
    } else {
      reduced_[d] = static_cast<int>(free_.size());
      free_.push_back(d);
    }
  }
}

Eigen::VectorXd DofConstraints::expand(const Eigen::VectorXd& r) const {
  Eigen::VectorXd full(num_dofs());
  for (int d = 0; d < num_dofs(); ++d) full[d] = fixed_[d] ? value_[d] : r[reduced_[d]];
  return full;
}

Eigen::VectorXd DofConstraints::restrict(const Eigen::VectorXd& full) const {
  Eigen::VectorXd r(num_free());
  for (int i = 0; i < num_free(); ++i) r[i] = full[free_[i]];
  return r;
}

SparseSystem eliminate_constraints(const SparseMatrix& a, const Eigen::VectorXd& b,
                                   const DofConstraints& c) {
  if (a.rows() != c.num_dofs() || a.cols() != c.num_dofs() || b.size() != c.num_dofs()) {
    throw ConfigError("constraint elimination: dimension mismatch");
  }
  SparseSystem sys;
  sys.constraints = c;
  sys.rhs = c.restrict(b);
  std::vector<Triplet> t;
  t.reserve(a.nonZeros());
  for (int col = 0; col < a.outerSize(); ++col) {
    const int rc = c.reduced(col);
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      const int rr = c.reduced(static_cast<int>(it.row()));
      if (rr < 0) continue;
      if (rc >= 0) {
        t.emplace_back(rr, rc, it.value());
      } else {
        sys.rhs[rr] -= it.value() * c.value(col);
      }
    }
  }
  sys.matrix.resize(c.num_free(), c.num_free());
  sys.matrix.setFromTriplets(t.begin(), t.end());
  sys.matrix.makeCompressed();
  return sys;
}

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double r = (a * x - b).norm();
  const double nb = b.norm();
  return nb > 0.0 ? r / nb : r;
}

int find_empty_line(const SparseMatrix& a) {
  std::vector<char> row_seen(a.rows(), 0);
  for (int col = 0; col < a.outerSize(); ++col) {
    bool any = false;
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      if (it.value() != 0.0) {
        any = true;
        row_seen[it.row()] = 1;
      }
    }
    if (!any) return col;
  }
  for (int r = 0; r < a.rows(); ++r) {
    if (!row_seen[r]) return r;
  }
  return -1;
}

struct LinearSolver::Impl {
  Eigen::UmfPackLU<SparseMatrix> lu;
  std::vector<SparseMatrix::StorageIndex> outer;
  std::vector<SparseMatrix::StorageIndex> inner;
  bool analyzed = false;

  bool same_pattern(const SparseMatrix& a) const {
    if (!analyzed || a.outerSize() + 1 != static_cast<Eigen::Index>(outer.size()) ||
        a.nonZeros() != static_cast<Eigen::Index>(inner.size())) {
      return false;
    }
    return std::memcmp(outer.data(), a.outerIndexPtr(), outer.size() * sizeof(outer[0])) == 0 &&
           std::memcmp(inner.data(), a.innerIndexPtr(), inner.size() * sizeof(inner[0])) == 0;
  }

  void remember_pattern(const SparseMatrix& a) {
    outer.assign(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1);
    inner.assign(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros());
    analyzed = true;
  }
};

LinearSolver::LinearSolver(SolverOptions options)
    : options_(options), impl_(std::make_unique<Impl>()) {
  // structurally symmetric saddle points factor fastest this way
  impl_->lu.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
  impl_->lu.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_METIS;
}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

Eigen::VectorXd LinearSolver::solve(const SparseMatrix& a, const Eigen::VectorXd& b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw SolverError("linear solve: dimension mismatch");
  }
  if (a.rows() == 0) return Eigen::VectorXd();
  if (!a.isCompressed()) throw SolverError("linear solve: matrix must be compressed");

  Eigen::VectorXd x;
  if (options_.kind == SolverKind::direct) {
    if (!impl_->same_pattern(a)) {
      impl_->lu.analyzePattern(a);
      if (impl_->lu.info() != Eigen::Success) {
        const int line = find_empty_line(a);
        throw SolverError("symbolic factorization failed", line >= 0 ? std::optional<int>(line)
                                                                      : std::nullopt);
      }
      impl_->remember_pattern(a);
    }
    impl_->lu.factorize(a);
    if (impl_->lu.info() != Eigen::Success) {
      const int line = find_empty_line(a);
      throw SolverError("matrix is singular", line >= 0 ? std::optional<int>(line) : std::nullopt);
    }
    x = impl_->lu.solve(b);
    last_iterations_ = 1;
    // Iterative refinement for ill-conditioned saddle points.
    for (int pass = 0; pass < 3 && relative_residual(a, x, b) > options_.tol; ++pass) {
      const Eigen::VectorXd r = b - a * x;
      x += impl_->lu.solve(r);
      ++last_iterations_;
    }
  } else {
    Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> it;
    it.preconditioner().setDroptol(1e-5);
    it.preconditioner().setFillfactor(20);
    it.setTolerance(options_.tol);
    it.setMaxIterations(options_.max_iterations);
    it.compute(a);
    if (it.info() != Eigen::Success) throw SolverError("preconditioner setup failed");
    x = it.solve(b);
    last_iterations_ = static_cast<int>(it.iterations());
  }

  last_residual_ = relative_residual(a, x, b);
  if (!(last_residual_ <= options_.tol)) {
    throw SolverError("relative residual " + std::to_string(last_residual_) +
                      " above tolerance " + std::to_string(options_.tol));
  }
  return x;
}

Eigen::VectorXd solve_sparse(const SparseSystem& sys, const SolverOptions& options) {
  LinearSolver solver(options);
  return sys.constraints.expand(solver.solve(sys.matrix, sys.rhs));
}

}  // namespace fsi
