#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sle {

using Vector = std::vector<double>;

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/**
 * Compressed sparse row matrix with a canonical entry order.
 *
 * Entries are kept sorted row-major then by column, without duplicates and
 * without explicit zeros. When every stored value is an exact integer the
 * matrix carries an integer-exactness flag, which enables exact products via
 * 64-bit accumulation.
 */
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols);

  /// Builds from unordered triplets; duplicates are summed and zeros dropped.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> triplets);
  static SparseMatrix identity(std::size_t n);
  static SparseMatrix diagonal(std::span<const double> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }
  bool is_integer() const { return integer_; }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  /// Entry lookup by binary search within the row; 0 when absent.
  double at(std::size_t r, std::size_t c) const;
  std::vector<Triplet> triplets() const;

  SparseMatrix transpose() const;
  /// Returns diag(left) * A * diag(right); empty spans mean identity.
  SparseMatrix scaled(std::span<const double> left, std::span<const double> right) const;
  /// Keeps only the listed columns, in the given order.
  SparseMatrix select_columns(std::span<const std::size_t> columns) const;

  double max_abs() const;
  double frobenius_norm() const;
  /// Sum of absolute values of all entries.
  double entry_l1_norm() const;

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  bool integer_ = true;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;

  void refresh_integer_flag();
};

/// y = A x. Throws std::invalid_argument on dimension mismatch.
Vector matvec(const SparseMatrix& a, std::span<const double> x);
/// y = A^T x.
Vector matvec_transpose(const SparseMatrix& a, std::span<const double> x);

/// Sparse product; exact when both inputs carry the integer flag.
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b);

/// True when every entry of the (integer) product A*B vanishes exactly.
bool product_is_zero(const SparseMatrix& a, const SparseMatrix& b);

double norm2(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
Vector subtract(std::span<const double> x, std::span<const double> y);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double norm_inf(std::span<const double> x);

}  // namespace sle
