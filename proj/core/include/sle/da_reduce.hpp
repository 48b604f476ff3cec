#pragma once

#include <cstddef>
#include <vector>

#include "sle/back_map.hpp"
#include "sle/sparse_matrix.hpp"

namespace sle {

enum class SystemClass { G, G_z, G_z2 };

const char* to_string(SystemClass c);

/// Integer sparse system A x = b tagged with the class it claims to belong to.
struct GeneralSystem {
  SparseMatrix a;
  Vector b;
  SystemClass tag = SystemClass::G;
};

bool has_zero_row_sums(const SparseMatrix& a);
/// Every row's positive-entry sum is a power of two.
bool has_pow2_positive_sums(const SparseMatrix& a);
/// Throws std::invalid_argument when the system does not satisfy its tag.
void check_class(const GeneralSystem& sys);

struct StageResult {
  GeneralSystem system;
  BackMap back_map;
};

/// Appends the column -A*1. A zero column (already zero row sums) is dropped.
StageResult to_zero_rowsum(const GeneralSystem& sys);
/// Pads each row to a power-of-two positive sum with a +g/-g column pair.
StageResult to_pow2(const GeneralSystem& sys);

enum class DAKind { difference, average };

/**
 * One difference-average equation, stored canonically.
 *
 * pattern is x(i) - x(j) or x(i) + x(j) - 2 x(k); the least-squares row it
 * contributes is sqrt(weight) * scale * pattern with right-hand side
 * sqrt(weight) * scale * rhs.
 */
struct DARow {
  DAKind kind = DAKind::difference;
  std::size_t i = 0, j = 0, k = 0;
  double weight = 1.0;
  double rhs = 0.0;
  double scale = 1.0;
  std::size_t source_row = 0;
};

struct WeightedDASystem {
  std::size_t n_vars = 0;
  std::vector<DARow> rows;
  std::size_t n_main = 0;
  std::size_t n_aux = 0;

  SparseMatrix as_matrix() const;
  Vector rhs_vector() const;
  /// Canonical +-1 / (1,1,-2) patterns, one row per equation, integer.
  SparseMatrix pattern_matrix() const;
  Vector canonical_rhs() const;
  /// Row factor sqrt(weight)*scale, i.e. as_matrix() = diag(row_factors) * pattern_matrix().
  Vector row_factors() const;
  bool unit_weights() const;
};

/// Builds an unweighted DA system directly from canonical rows.
WeightedDASystem make_da_system(std::size_t n_vars, std::vector<DARow> rows);

struct AuxRecord {
  std::size_t new_var;
  std::size_t first;
  std::size_t second;
  int sign;
  unsigned bit;
  std::size_t source_row;
};

struct DAReductionTrace {
  std::size_t n_original = 0;
  std::vector<AuxRecord> aux;
  std::vector<double> row_weight;     // w_i per source row
  std::vector<std::size_t> aux_rows;  // auxiliary equations per source row
};

struct DAReduction {
  WeightedDASystem system;
  Vector rhs;  // equals system.rhs_vector()
  DAReductionTrace trace;
};

/// Nonzero growth constant: nnz(B) <= kDANnzConstant * nnz(A) * log2(2 + max|A|).
inline constexpr double kDANnzConstant = 6.0;

DAReduction gz2_to_da(const GeneralSystem& sys, double alpha = 1.0);

/// Zero when A^T b = 0, else the first n coordinates of xB.
Vector map_da_solution_back(const GeneralSystem& sys, std::span<const double> xb);
BackMap da_back_map(const GeneralSystem& sys, std::size_t n_da_vars);

/// epsA / (sqrt(n m) * max|A| * ||b||); epsA itself when b = 0.
double choose_epsilon_da(double eps_a, const GeneralSystem& sys);

}  // namespace sle
