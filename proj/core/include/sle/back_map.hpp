#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sle/sparse_matrix.hpp"

namespace sle {

/**
 * Linear map taking a solution of a reduced problem back to the problem it
 * came from. Three shapes cover every stage of the chain:
 *   select  out[i] = in[index[i]]
 *   shift   out[i] = in[i] - in[n_out]          (n_in = n_out + 1)
 *   zero    out = 0                             (right-hand side orthogonal to the image)
 */
struct BackMap {
  enum class Kind { select, shift, zero };

  Kind kind = Kind::select;
  std::size_t n_in = 0;
  std::size_t n_out = 0;
  std::vector<std::size_t> index;
  std::string stage;

  static BackMap identity(std::size_t n, std::string stage = "identity");
  static BackMap leading(std::size_t n_in, std::size_t n_out, std::string stage);
  static BackMap shift_by_last(std::size_t n_out, std::string stage);
  static BackMap zero(std::size_t n_in, std::size_t n_out, std::string stage);
  static BackMap select(std::size_t n_in, std::vector<std::size_t> index, std::string stage);

  Vector apply(std::span<const double> in) const;
};

/// Applies maps in order, i.e. maps.front() first (closest to the solver).
Vector apply_chain(const std::vector<BackMap>& maps, std::span<const double> in);

}  // namespace sle
