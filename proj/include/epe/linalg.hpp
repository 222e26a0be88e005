#pragma once

/// \file linalg.hpp
/// Solver contracts used by the time steppers:
///  - spd_solve: Jacobi-preconditioned conjugate gradients,
///  - SpdSolver: factor-once SPD solver (sparse LDL^T, PCG above a size threshold),
///  - SaddleSolver / saddle_solve: the symmetric quasi-definite system
///      [A, -B^T; -B, -C] (u, p) = (f_u, -f_p),
///    by sparse LDL^T, or Schur-complement CG above the threshold,
///  - LuSolver: general sparse LU for the nonsymmetric coupled system.
/// Every solve reports the relative residual |Kx - b| / |b| recomputed from
/// the returned x, and throws NotConverged if it exceeds the tolerance.

#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <utility>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "epe/core.hpp"
#include "epe/sparse.hpp"

namespace epe {

using Vector = Eigen::VectorXd;
using CscMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

struct LinearSolveReport {
  int iterations = 0;  // 0 for direct solves
  double relative_residual = 0.0;
  double seconds = 0.0;
};

struct SolveResult {
  Vector x;
  LinearSolveReport report;
};

/// |A x - b| / |b|; the absolute residual when b = 0.
template <class Matrix>
double relative_residual(const Matrix& A, const Vector& x, const Vector& b) {
  const double nb = b.norm();
  const double nr = (A * x - b).norm();
  return nb > 0.0 ? nr / nb : nr;
}

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline void check_square(const CsrMatrix& A, const Vector& b) {
  if (A.rows() != A.cols()) throw DimensionMismatch("matrix is not square");
  if (A.rows() != b.size()) throw DimensionMismatch("right-hand side length does not match matrix");
}

}  // namespace detail

/// Preconditioned CG on an abstract operator. `apply(v)` returns A v and
/// `precondition(r)` returns M^{-1} r. Converges on the true residual
/// |b - A x| <= tol |b|; a non-positive curvature p^T A p <= 0 aborts with
/// NotConverged.
template <class Apply, class Precondition>
std::pair<Vector, int> pcg(Apply&& apply, Precondition&& precondition, const Vector& b, double tol,
                           int max_iterations) {
  const double nb = b.norm();
  Vector x = Vector::Zero(b.size());
  if (nb == 0.0) return {x, 0};
  Vector r = b;
  Vector z = precondition(r);
  Vector p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= max_iterations; ++it) {
    const Vector Ap = apply(p);
    const double curvature = p.dot(Ap);
    if (!(curvature > 0.0)) throw NotConverged(it, r.norm() / nb);
    const double step = rz / curvature;
    x += step * p;
    r -= step * Ap;
    if (r.norm() <= tol * nb) {
      // Confirm on the explicit residual; the recurrence can drift.
      r = b - apply(x);
      if (r.norm() <= tol * nb) return {x, it};
    }
    z = precondition(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  throw NotConverged(max_iterations, r.norm() / nb);
}

inline SolveResult spd_solve(const CsrMatrix& A, const Vector& b, double tol, int max_iterations = 20000) {
  detail::check_square(A, b);
  detail::Stopwatch clock;
  Vector inv_diag(A.rows());
  for (int i = 0; i < A.rows(); ++i) {
    const double d = A.coeff(i, i);
    inv_diag[i] = d > 0.0 ? 1.0 / d : 1.0;
  }
  auto [x, iterations] = pcg([&](const Vector& v) -> Vector { return A * v; },
                             [&](const Vector& r) -> Vector { return inv_diag.cwiseProduct(r); }, b, tol,
                             max_iterations);
  SolveResult out{std::move(x), {iterations, 0.0, 0.0}};
  out.report.relative_residual = relative_residual(A, out.x, b);
  out.report.seconds = clock.seconds();
  if (out.report.relative_residual > tol) throw NotConverged(iterations, out.report.relative_residual);
  return out;
}

namespace detail {

// Factorization + residual-checked solve with a few steps of iterative
// refinement. Backend is an Eigen sparse direct solver on CscMatrix.
template <class Backend>
class Factorized {
 public:
  Factorized() = default;

  explicit Factorized(const CsrMatrix& A) : A_(A) {
    if (A.rows() != A.cols()) throw DimensionMismatch("matrix is not square");
    if (A.rows() == 0) return;
    backend_ = std::make_unique<Backend>();
    backend_->compute(CscMatrix(A));
    if (backend_->info() != Eigen::Success) throw SingularSystem("sparse factorization failed");
  }

  int size() const { return static_cast<int>(A_.rows()); }
  const CsrMatrix& matrix() const { return A_; }

  /// Solve without a residual contract (used for inner solves).
  Vector apply_inverse(const Vector& b) const {
    if (A_.rows() == 0) return Vector::Zero(b.size());
    Vector x = backend_->solve(b);
    x += backend_->solve(Vector(b - A_ * x));
    return x;
  }

  SolveResult solve(const Vector& b, double tol) const {
    if (b.size() != A_.rows()) throw DimensionMismatch("right-hand side length does not match matrix");
    detail::Stopwatch clock;
    SolveResult out{Vector::Zero(b.size()), {}};
    if (A_.rows() == 0) return out;
    out.x = backend_->solve(b);
    if (backend_->info() != Eigen::Success || !out.x.allFinite()) throw SingularSystem("sparse triangular solve failed");
    double res = relative_residual(A_, out.x, b);
    for (int k = 0; k < 3 && res > 0.1 * tol; ++k) {
      const Vector correction = backend_->solve(b - A_ * out.x);
      const Vector candidate = out.x + correction;
      const double cand_res = relative_residual(A_, candidate, b);
      if (!(cand_res < res)) break;
      out.x = candidate;
      res = cand_res;
    }
    out.report.relative_residual = res;
    out.report.seconds = clock.seconds();
    if (res > tol) throw NotConverged(0, res);
    return out;
  }

 private:
  CsrMatrix A_;
  std::unique_ptr<Backend> backend_;
};

}  // namespace detail

/// Sparse LDL^T (AMD ordering, no pivoting): valid for SPD and symmetric
/// quasi-definite matrices.
using LdltSolver = detail::Factorized<Eigen::SimplicialLDLT<CscMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>>;
/// Sparse LU with COLAMD ordering for general square matrices.
using LuSolver = detail::Factorized<Eigen::SparseLU<CscMatrix, Eigen::COLAMDOrdering<int>>>;

/// SPD system solved repeatedly with one matrix: factorized once when small
/// enough, otherwise PCG per solve.
class SpdSolver {
 public:
  SpdSolver() = default;
  SpdSolver(const CsrMatrix& A, const SolverOptions& opts) : A_(A), opts_(opts) {
    if (A.rows() <= opts.direct_threshold) direct_.emplace(A);
  }

  bool is_direct() const { return direct_.has_value(); }
  int size() const { return static_cast<int>(A_.rows()); }

  SolveResult solve(const Vector& b) const {
    if (direct_) return direct_->solve(b, opts_.spd_tol);
    return spd_solve(A_, b, opts_.spd_tol, opts_.max_iterations);
  }

 private:
  CsrMatrix A_;
  SolverOptions opts_;
  std::optional<LdltSolver> direct_;
};

/// Blocks of the Biot-type saddle system; A is SPD on U, B maps U -> P
/// (rows P), C is symmetric positive semidefinite with C + B A^{-1} B^T definite.
struct SaddleBlocks {
  CsrMatrix A;
  CsrMatrix B;
  CsrMatrix C;
};

struct SaddleSolution {
  Vector u;
  Vector p;
  LinearSolveReport report;
};

/// [A, -B^T; -B, -C] as one symmetric matrix.
inline CsrMatrix saddle_matrix(const SaddleBlocks& blocks) {
  const int nu = static_cast<int>(blocks.A.rows()), np = static_cast<int>(blocks.C.rows());
  Triplets t;
  t.reserve(static_cast<std::size_t>(blocks.A.nonZeros() + 2 * blocks.B.nonZeros() + blocks.C.nonZeros()));
  for (int r = 0; r < blocks.A.outerSize(); ++r)
    for (CsrMatrix::InnerIterator it(blocks.A, r); it; ++it) t.emplace_back(r, it.col(), it.value());
  for (int r = 0; r < blocks.B.outerSize(); ++r)
    for (CsrMatrix::InnerIterator it(blocks.B, r); it; ++it) {
      t.emplace_back(nu + r, it.col(), -it.value());
      t.emplace_back(it.col(), nu + r, -it.value());
    }
  for (int r = 0; r < blocks.C.outerSize(); ++r)
    for (CsrMatrix::InnerIterator it(blocks.C, r); it; ++it) t.emplace_back(nu + r, nu + it.col(), -it.value());
  return csr_from_triplets(nu + np, nu + np, t);
}

class SaddleSolver {
 public:
  SaddleSolver() = default;

  SaddleSolver(SaddleBlocks blocks, const SolverOptions& opts) : blocks_(std::move(blocks)), opts_(opts) {
    const auto nu = blocks_.A.rows(), np = blocks_.C.rows();
    if (blocks_.A.cols() != nu || blocks_.C.cols() != np || blocks_.B.rows() != np || blocks_.B.cols() != nu)
      throw DimensionMismatch("inconsistent saddle block dimensions");
    K_ = saddle_matrix(blocks_);
    if (K_.rows() <= opts.direct_threshold) {
      direct_.emplace(K_);
    } else {
      a_solver_.emplace(blocks_.A);
      c_diag_.resize(np);
      for (int i = 0; i < np; ++i) {
        const double d = blocks_.C.coeff(i, i);
        c_diag_[i] = d > 0.0 ? 1.0 / d : 1.0;
      }
    }
  }

  bool is_direct() const { return direct_.has_value(); }
  const CsrMatrix& matrix() const { return K_; }

  SaddleSolution solve(const Vector& f_u, const Vector& f_p) const {
    const auto nu = blocks_.A.rows(), np = blocks_.C.rows();
    if (f_u.size() != nu || f_p.size() != np) throw DimensionMismatch("saddle right-hand side has wrong size");
    Vector rhs(nu + np);
    rhs << f_u, -f_p;
    if (direct_) {
      auto r = direct_->solve(rhs, opts_.saddle_tol);
      return {r.x.head(nu), r.x.tail(np), r.report};
    }
    // Schur complement: (C + B A^{-1} B^T) p = f_p - B A^{-1} f_u, then
    // u = A^{-1} (f_u + B^T p).
    detail::Stopwatch clock;
    auto solve_a = [&](const Vector& v) { return a_solver_->apply_inverse(v); };
    const Vector g = f_p - blocks_.B * solve_a(f_u);
    auto [p, iterations] = pcg(
        [&](const Vector& v) -> Vector {
          return blocks_.C * v + blocks_.B * solve_a(Vector(blocks_.B.transpose() * v));
        },
        [&](const Vector& r) -> Vector { return c_diag_.cwiseProduct(r); }, g, 1e-2 * opts_.saddle_tol,
        opts_.max_iterations);
    Vector u = solve_a(f_u + blocks_.B.transpose() * p);
    Vector x(nu + np);
    x << u, p;
    SaddleSolution out{std::move(u), std::move(p), {iterations, relative_residual(K_, x, rhs), clock.seconds()}};
    if (out.report.relative_residual > opts_.saddle_tol) throw NotConverged(iterations, out.report.relative_residual);
    return out;
  }

 private:
  SaddleBlocks blocks_;
  SolverOptions opts_;
  CsrMatrix K_;
  std::optional<LdltSolver> direct_;
  std::optional<LdltSolver> a_solver_;
  Vector c_diag_;
};

inline SaddleSolution saddle_solve(const SaddleBlocks& blocks, const Vector& f_u, const Vector& f_p,
                                   const SolverOptions& opts) {
  return SaddleSolver(blocks, opts).solve(f_u, f_p);
}

}  // namespace epe
