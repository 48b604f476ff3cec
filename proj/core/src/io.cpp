#include "sle/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sle {

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot open " + p.string() + " for writing");
  return os;
}

std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream is(p);
  if (!is) throw std::runtime_error("cannot open " + p.string());
  return is;
}

void put_real(std::ostream& os, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, res.ptr - buf);
}

}  // namespace

void write_matrix_market(std::ostream& os, const SparseMatrix& a) {
  const bool integer = a.is_integer();
  os << "%%MatrixMarket matrix coordinate " << (integer ? "integer" : "real") << " general\n";
  os << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  for (const auto& t : a.triplets()) {
    os << t.row + 1 << ' ' << t.col + 1 << ' ';
    if (integer) {
      os << static_cast<long long>(t.value);
    } else {
      put_real(os, t.value);
    }
    os << '\n';
  }
}

SparseMatrix read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("matrix market: empty input");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate") {
    throw std::runtime_error("matrix market: only coordinate matrices are supported");
  }
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "integer" && field != "real") {
    throw std::runtime_error("matrix market: unsupported field '" + field + "'");
  }
  if (symmetry != "general") {
    throw std::runtime_error("matrix market: unsupported symmetry '" + symmetry + "'");
  }
  do {
    if (!std::getline(is, line)) throw std::runtime_error("matrix market: missing size line");
  } while (line.empty() || line[0] == '%');

  std::size_t rows = 0, cols = 0, nnz = 0;
  std::istringstream size_line(line);
  if (!(size_line >> rows >> cols >> nnz)) throw std::runtime_error("matrix market: bad size line");

  std::vector<Triplet> t;
  t.reserve(nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    std::size_t r = 0, c = 0;
    double v = 0.0;
    if (!(is >> r >> c >> v)) throw std::runtime_error("matrix market: truncated entries");
    if (r == 0 || c == 0 || r > rows || c > cols) {
      throw std::runtime_error("matrix market: entry index out of range");
    }
    t.push_back({r - 1, c - 1, v});
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

void write_matrix_market(const std::filesystem::path& p, const SparseMatrix& a) {
  auto os = open_out(p);
  write_matrix_market(os, a);
}

SparseMatrix read_matrix_market(const std::filesystem::path& p) {
  auto is = open_in(p);
  return read_matrix_market(is);
}

void write_vector(std::ostream& os, std::span<const double> v) {
  for (double x : v) {
    put_real(os, x);
    os << '\n';
  }
}

Vector read_vector(std::istream& is) {
  Vector v;
  std::string line;
  while (std::getline(is, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%' || line[first] == '#') continue;
    v.push_back(std::stod(line.substr(first)));
  }
  return v;
}

void write_vector(const std::filesystem::path& p, std::span<const double> v) {
  auto os = open_out(p);
  write_vector(os, v);
}

Vector read_vector(const std::filesystem::path& p) {
  auto is = open_in(p);
  return read_vector(is);
}

}  // namespace sle
