#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sle/sparse_matrix.hpp"

namespace sle {

enum class SpectralMode { dense_svd, iterative_estimate };

inline constexpr std::size_t kDenseLimit = 3000;

struct SpectralSummary {
  double sigma_max = 0.0;
  double sigma_min_nonzero = 0.0;  // NaN when unavailable
  std::size_t rank = 0;            // 0 and meaningless in iterative mode
  SpectralMode method = SpectralMode::dense_svd;
  bool sigma_min_available = false;

  double condition() const { return sigma_max / sigma_min_nonzero; }
  std::size_t nullity(std::size_t cols) const { return cols - rank; }
};

class SizeGuardError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Eigen::MatrixXd to_dense(const SparseMatrix& a);

/// All singular values, descending. Throws SizeGuardError above the limit.
std::vector<double> singular_values(const SparseMatrix& a, std::size_t dense_limit = kDenseLimit);

/// Numerical rank threshold used throughout: max(m,n) * eps * sigma_max * 10.
double rank_threshold(std::size_t rows, std::size_t cols, double sigma_max);

/// sigma_max by power iteration on A^T A from a seeded random start.
double estimate_sigma_max(const SparseMatrix& a, std::uint64_t seed = 1,
                          std::size_t max_iter = 2000);

SpectralSummary spectral_summary(const SparseMatrix& a, SpectralMode mode,
                                 std::size_t dense_limit = kDenseLimit);

}  // namespace sle
