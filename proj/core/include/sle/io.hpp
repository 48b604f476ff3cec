#pragma once

#include <filesystem>
#include <iosfwd>

#include "sle/sparse_matrix.hpp"

namespace sle {

/// Matrix Market coordinate format, general symmetry, integer or real field.
/// Integer-exact matrices are written with the integer field.
void write_matrix_market(std::ostream& os, const SparseMatrix& a);
SparseMatrix read_matrix_market(std::istream& is);

void write_matrix_market(const std::filesystem::path& p, const SparseMatrix& a);
SparseMatrix read_matrix_market(const std::filesystem::path& p);

/// One value per line, written with round-trip precision.
void write_vector(std::ostream& os, std::span<const double> v);
Vector read_vector(std::istream& is);

void write_vector(const std::filesystem::path& p, std::span<const double> v);
Vector read_vector(const std::filesystem::path& p);

}  // namespace sle
