#pragma once

#include <cstddef>
#include <string>

#include "sle/complex2.hpp"
#include "sle/sparse_matrix.hpp"

namespace sle {

enum class OperatorRoute { laplacian, gram };

struct OperatorSolveOptions {
  std::size_t dense_limit = 3000;
  /// Lower bound on the smallest nonzero singular value of the operator;
  /// required when the operator is too large for a dense spectrum.
  double sigma_min_lower_bound = 0.0;
  std::size_t max_iter = 50000;
};

struct OperatorSolveResult {
  Vector f;
  double inner_eps = 0.0;         // relative accuracy demanded from the inner solve
  double sigma_min_operator = 0.0;
  double sigma_max_d2 = 0.0;
  bool dense_spectrum = false;
  bool degenerate = false;        // d != 0 but its projection onto im(d2) vanishes
  bool converged = false;
  std::size_t iterations = 0;
  double certified_error = 0.0;   // ||d2 f - P d|| / ||P d||, measured afterwards
  std::string note;
};

/**
 * Solves the boundary problem d2 f ~ d through an operator solve:
 * L1 = d1^T d1 + d2 d2^T (laplacian) or d2 d2^T (gram). The inner tolerance
 * is delta * sigma_min(L)^{1/2} / (sigma_max(d2)^2 ||d||) and f = d2^T x.
 */
OperatorSolveResult solve_boundary_via_laplacian(const Complex2& k, std::span<const double> d,
                                                 double delta, const OperatorSolveOptions& opts = {});
OperatorSolveResult solve_boundary_via_gram(const Complex2& k, std::span<const double> d,
                                            double delta, const OperatorSolveOptions& opts = {});
OperatorSolveResult solve_boundary(const Complex2& k, std::span<const double> d, double delta,
                                   OperatorRoute route, const OperatorSolveOptions& opts = {});

}  // namespace sle
