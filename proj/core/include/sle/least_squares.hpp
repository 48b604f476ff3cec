#pragma once

#include <cstddef>
#include <span>

#include "sle/sparse_matrix.hpp"

namespace sle {

struct LsqrOptions {
  double atol = 1e-10;
  double btol = 1e-10;
  std::size_t max_iter = 10000;
};

enum class LsqrStop {
  zero_rhs,        // b = 0 or A^T b = 0, x = 0 is a minimizer
  compatible,      // ||r|| <= btol ||b|| + atol ||A|| ||x||
  least_squares,   // ||A^T r|| <= atol ||A|| ||r||
  iteration_limit,
};

struct LsqrOutcome {
  Vector x;
  std::size_t iterations = 0;
  LsqrStop stop = LsqrStop::iteration_limit;
  double residual_norm = 0.0;         // running estimate of ||b - Ax||
  double normal_residual_norm = 0.0;  // running estimate of ||A^T (b - Ax)||
  double anorm_estimate = 0.0;

  bool converged() const { return stop != LsqrStop::iteration_limit; }
};

/**
 * Golub-Kahan bidiagonalization least squares (LSQR) from x0 = 0.
 *
 * Iterates stay in the row space of A, so on rank-deficient problems the
 * limit is the minimum-norm minimizer.
 */
LsqrOutcome lsqr(const SparseMatrix& a, std::span<const double> b, const LsqrOptions& opts);

struct LeastSquaresResult {
  Vector x;
  double residual_norm = 0.0;            // ||Ax - b||
  double projected_residual_norm = 0.0;  // ||Ax - P_A b|| (estimate)
  double projected_rhs_norm = 0.0;       // ||P_A b|| (estimate)
  std::size_t iterations = 0;
  bool converged = false;
};

struct LeastSquaresOptions {
  double rel_tol = 1e-8;
  std::size_t max_iter = 20000;
  /// When set, the projected residual is certified against a reference solve
  /// run 100x tighter, and the primary tolerance is tightened until it passes.
  bool certify = true;
};

/**
 * Approximately solves min ||Ax - b||.
 *
 * With certify enabled, converged == true guarantees
 * ||Ax - P_A b|| <= rel_tol ||P_A b|| where P_A b is the image of the reference
 * solve. Non-convergence is reported through the flag.
 */
LeastSquaresResult least_squares(const SparseMatrix& a, std::span<const double> b,
                                 const LeastSquaresOptions& opts);
LeastSquaresResult least_squares(const SparseMatrix& a, std::span<const double> b,
                                 double rel_tol, std::size_t max_iter);

/// Estimate of P_A b: A times a tightly converged LSQR solution.
Vector projection_estimate(const SparseMatrix& a, std::span<const double> b,
                           double tol = 1e-14, std::size_t max_iter = 0);

struct ProjectionResidual {
  double residual = 0.0;  // ||Ax - P_A b||
  double rhs = 0.0;       // ||P_A b||

  double relative() const { return rhs > 0.0 ? residual / rhs : residual; }
};

ProjectionResidual projection_residual(const SparseMatrix& a, std::span<const double> x,
                                       std::span<const double> b);

}  // namespace sle
