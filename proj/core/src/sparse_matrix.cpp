#include "sle/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sle {

namespace {

bool is_exact_integer(double v) {
  return std::isfinite(v) && v == std::nearbyint(v) && std::fabs(v) < 9.0e15;
}

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) {
      throw std::out_of_range("triplet (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                              ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
    }
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseMatrix m(rows, cols);
  m.col_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::vector<std::size_t> counts(rows, 0);
  for (std::size_t k = 0; k < triplets.size();) {
    std::size_t r = triplets[k].row;
    std::size_t c = triplets[k].col;
    double sum = 0.0;
    while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) {
      sum += triplets[k].value;
      ++k;
    }
    if (sum != 0.0) {
      m.col_idx_.push_back(c);
      m.values_.push_back(sum);
      ++counts[r];
    }
  }
  for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] = m.row_ptr_[r] + counts[r];
  m.refresh_integer_flag();
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<double> ones(n, 1.0);
  return diagonal(ones);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> diag) {
  std::vector<Triplet> t;
  t.reserve(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) t.push_back({i, i, diag[i]});
  return from_triplets(diag.size(), diag.size(), std::move(t));
}

void SparseMatrix::refresh_integer_flag() {
  integer_ = std::all_of(values_.begin(), values_.end(), is_exact_integer);
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) throw std::out_of_range("SparseMatrix::at");
  auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
  auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
  auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      out.push_back({r, col_idx_[k], values_[k]});
    }
  }
  return out;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols_, rows_);
  std::vector<std::size_t> counts(cols_, 0);
  for (std::size_t c : col_idx_) ++counts[c];
  for (std::size_t c = 0; c < cols_; ++c) t.row_ptr_[c + 1] = t.row_ptr_[c] + counts[c];
  t.col_idx_.resize(nnz());
  t.values_.resize(nnz());
  std::vector<std::size_t> next(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
  // rows are visited in increasing order, so each transposed row stays sorted
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      std::size_t dst = next[col_idx_[k]]++;
      t.col_idx_[dst] = r;
      t.values_[dst] = values_[k];
    }
  }
  t.integer_ = integer_;
  return t;
}

SparseMatrix SparseMatrix::scaled(std::span<const double> left,
                                  std::span<const double> right) const {
  require(left.empty() || left.size() == rows_, "scaled: left scaling size mismatch");
  require(right.empty() || right.size() == cols_, "scaled: right scaling size mismatch");
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    double lr = left.empty() ? 1.0 : left[r];
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      double rc = right.empty() ? 1.0 : right[col_idx_[k]];
      t.push_back({r, col_idx_[k], lr * values_[k] * rc});
    }
  }
  return from_triplets(rows_, cols_, std::move(t));
}

SparseMatrix SparseMatrix::select_columns(std::span<const std::size_t> columns) const {
  std::vector<std::ptrdiff_t> where(cols_, -1);
  for (std::size_t j = 0; j < columns.size(); ++j) {
    require(columns[j] < cols_, "select_columns: column out of range");
    where[columns[j]] = static_cast<std::ptrdiff_t>(j);
  }
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (where[col_idx_[k]] >= 0) {
        t.push_back({r, static_cast<std::size_t>(where[col_idx_[k]]), values_[k]});
      }
    }
  }
  return from_triplets(rows_, columns.size(), std::move(t));
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

double SparseMatrix::frobenius_norm() const { return norm2(values_); }

double SparseMatrix::entry_l1_norm() const {
  double s = 0.0;
  for (double v : values_) s += std::fabs(v);
  return s;
}

bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.row_ptr_ == b.row_ptr_ &&
         a.col_idx_ == b.col_idx_ && a.values_ == b.values_;
}

Vector matvec(const SparseMatrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) {
    throw std::invalid_argument("matvec: expected vector of size " + std::to_string(a.cols()) +
                                ", got " + std::to_string(x.size()));
  }
  Vector y(a.rows(), 0.0);
  auto rp = a.row_ptr();
  auto ci = a.col_idx();
  auto v = a.values();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double s = 0.0;
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) s += v[k] * x[ci[k]];
    y[r] = s;
  }
  return y;
}

Vector matvec_transpose(const SparseMatrix& a, std::span<const double> x) {
  if (x.size() != a.rows()) {
    throw std::invalid_argument("matvec_transpose: expected vector of size " +
                                std::to_string(a.rows()) + ", got " + std::to_string(x.size()));
  }
  Vector y(a.cols(), 0.0);
  auto rp = a.row_ptr();
  auto ci = a.col_idx();
  auto v = a.values();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double xr = x[r];
    if (xr == 0.0) continue;
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) y[ci[k]] += v[k] * xr;
  }
  return y;
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  require(a.cols() == b.rows(), "multiply: inner dimension mismatch");
  const bool exact = a.is_integer() && b.is_integer();
  std::vector<Triplet> out;
  std::vector<double> acc(b.cols(), 0.0);
  std::vector<std::int64_t> iacc(exact ? b.cols() : 0, 0);
  std::vector<char> touched(b.cols(), 0);
  std::vector<std::size_t> cols_hit;
  auto arp = a.row_ptr();
  auto aci = a.col_idx();
  auto av = a.values();
  auto brp = b.row_ptr();
  auto bci = b.col_idx();
  auto bv = b.values();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    cols_hit.clear();
    for (std::size_t k = arp[r]; k < arp[r + 1]; ++k) {
      std::size_t mid = aci[k];
      for (std::size_t l = brp[mid]; l < brp[mid + 1]; ++l) {
        std::size_t c = bci[l];
        if (!touched[c]) {
          touched[c] = 1;
          cols_hit.push_back(c);
        }
        if (exact) {
          iacc[c] += static_cast<std::int64_t>(av[k]) * static_cast<std::int64_t>(bv[l]);
        } else {
          acc[c] += av[k] * bv[l];
        }
      }
    }
    for (std::size_t c : cols_hit) {
      double val = exact ? static_cast<double>(iacc[c]) : acc[c];
      if (val != 0.0) out.push_back({r, c, val});
      touched[c] = 0;
      if (exact) iacc[c] = 0; else acc[c] = 0.0;
    }
  }
  return SparseMatrix::from_triplets(a.rows(), b.cols(), std::move(out));
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "add: dimension mismatch");
  auto t = a.triplets();
  auto tb = b.triplets();
  t.insert(t.end(), tb.begin(), tb.end());
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(t));
}

bool product_is_zero(const SparseMatrix& a, const SparseMatrix& b) {
  if (!a.is_integer() || !b.is_integer()) {
    throw std::invalid_argument("product_is_zero: integer matrices required");
  }
  return multiply(a, b).nnz() == 0;
}

double norm2(std::span<const double> x) {
  // scaled accumulation avoids overflow for the very large weights used downstream
  double scale = 0.0;
  double ssq = 1.0;
  for (double v : x) {
    if (v == 0.0) continue;
    double av = std::fabs(v);
    if (scale < av) {
      ssq = 1.0 + ssq * (scale / av) * (scale / av);
      scale = av;
    } else {
      ssq += (av / scale) * (av / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

double dot(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "dot: size mismatch");
  return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

Vector subtract(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "subtract: size mismatch");
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return out;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require(x.size() == y.size(), "axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace sle
