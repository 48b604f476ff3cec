#include "sle/da_reduce.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace sle {

namespace {

using Coeffs = std::map<std::size_t, std::int64_t>;  // ordered by variable index

bool is_pow2(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

std::vector<Coeffs> integer_rows(const SparseMatrix& a) {
  if (!a.is_integer()) throw std::invalid_argument("integer matrix required");
  std::vector<Coeffs> rows(a.rows());
  auto rp = a.row_ptr();
  auto ci = a.col_idx();
  auto v = a.values();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) {
      rows[r][ci[k]] = static_cast<std::int64_t>(v[k]);
    }
  }
  return rows;
}

std::int64_t positive_sum(const SparseMatrix& a, std::size_t r) {
  std::int64_t p = 0;
  for (std::size_t k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) {
    if (a.values()[k] > 0) p += static_cast<std::int64_t>(a.values()[k]);
  }
  return p;
}

}  // namespace

const char* to_string(SystemClass c) {
  switch (c) {
    case SystemClass::G: return "G";
    case SystemClass::G_z: return "G_z";
    case SystemClass::G_z2: return "G_z2";
  }
  return "?";
}

bool has_zero_row_sums(const SparseMatrix& a) {
  if (!a.is_integer()) return false;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    std::int64_t s = 0;
    for (std::size_t k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) {
      s += static_cast<std::int64_t>(a.values()[k]);
    }
    if (s != 0) return false;
  }
  return true;
}

bool has_pow2_positive_sums(const SparseMatrix& a) {
  if (!a.is_integer()) return false;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    if (!is_pow2(positive_sum(a, r))) return false;
  }
  return true;
}

void check_class(const GeneralSystem& sys) {
  const auto& a = sys.a;
  if (sys.b.size() != a.rows()) throw std::invalid_argument("system: rhs size mismatch");
  if (!a.is_integer()) throw std::invalid_argument("system: matrix entries must be integers");
  std::vector<char> col_used(a.cols(), 0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    if (a.row_ptr()[r] == a.row_ptr()[r + 1]) {
      throw std::invalid_argument("system: row " + std::to_string(r) + " is all zero");
    }
  }
  for (std::size_t c : a.col_idx()) col_used[c] = 1;
  for (std::size_t c = 0; c < a.cols(); ++c) {
    if (!col_used[c]) throw std::invalid_argument("system: column " + std::to_string(c) + " is all zero");
  }
  if (sys.tag != SystemClass::G && !has_zero_row_sums(a)) {
    throw std::invalid_argument(std::string("system: class ") + to_string(sys.tag) +
                                " requires zero row sums");
  }
  if (sys.tag == SystemClass::G_z2 && !has_pow2_positive_sums(a)) {
    throw std::invalid_argument("system: class G_z2 requires power-of-two positive row sums");
  }
}

StageResult to_zero_rowsum(const GeneralSystem& sys) {
  check_class(sys);
  const auto& a = sys.a;
  const std::size_t n = a.cols();
  std::vector<Triplet> t = a.triplets();
  bool any = false;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    std::int64_t s = 0;
    for (std::size_t k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) {
      s += static_cast<std::int64_t>(a.values()[k]);
    }
    if (s != 0) {
      t.push_back({r, n, static_cast<double>(-s)});
      any = true;
    }
  }
  StageResult out;
  out.system.tag = SystemClass::G_z;
  out.system.b = sys.b;
  if (!any) {
    out.system.a = a;
    out.back_map = BackMap::identity(n, "zero_rowsum");
  } else {
    out.system.a = SparseMatrix::from_triplets(a.rows(), n + 1, std::move(t));
    out.back_map = BackMap::shift_by_last(n, "zero_rowsum");
  }
  return out;
}

StageResult to_pow2(const GeneralSystem& sys) {
  if (sys.tag == SystemClass::G) throw std::invalid_argument("to_pow2: class G_z input required");
  check_class(sys);
  const auto& a = sys.a;
  const std::size_t n = a.cols();
  const std::size_t m = a.rows();
  std::vector<Triplet> t = a.triplets();
  bool any = false;
  for (std::size_t r = 0; r < m; ++r) {
    const std::int64_t p = positive_sum(a, r);
    if (p < 1) throw std::logic_error("to_pow2: nonzero zero-sum row without positive entry");
    const std::int64_t g = static_cast<std::int64_t>(std::bit_ceil(static_cast<std::uint64_t>(p))) - p;
    if (g != 0) {
      t.push_back({r, n, static_cast<double>(g)});
      t.push_back({r, n + 1, static_cast<double>(-g)});
      any = true;
    }
  }
  StageResult out;
  out.system.tag = SystemClass::G_z2;
  if (!any) {
    out.system.a = a;
    out.system.b = sys.b;
    out.back_map = BackMap::identity(n, "pow2");
    return out;
  }
  t.push_back({m, n, 1.0});
  t.push_back({m, n + 1, -1.0});
  out.system.a = SparseMatrix::from_triplets(m + 1, n + 2, std::move(t));
  out.system.b = sys.b;
  out.system.b.push_back(0.0);
  out.back_map = BackMap::leading(n + 2, n, "pow2");
  return out;
}

// ---------------------------------------------------------------------------

SparseMatrix WeightedDASystem::pattern_matrix() const {
  std::vector<Triplet> t;
  t.reserve(3 * rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.kind == DAKind::difference) {
      t.push_back({r, row.i, 1.0});
      t.push_back({r, row.j, -1.0});
    } else {
      t.push_back({r, row.i, 1.0});
      t.push_back({r, row.j, 1.0});
      t.push_back({r, row.k, -2.0});
    }
  }
  return SparseMatrix::from_triplets(rows.size(), n_vars, std::move(t));
}

Vector WeightedDASystem::row_factors() const {
  Vector f(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) f[r] = std::sqrt(rows[r].weight) * rows[r].scale;
  return f;
}

SparseMatrix WeightedDASystem::as_matrix() const {
  Vector f = row_factors();
  return pattern_matrix().scaled(f, {});
}

Vector WeightedDASystem::canonical_rhs() const {
  Vector c(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) c[r] = rows[r].rhs;
  return c;
}

Vector WeightedDASystem::rhs_vector() const {
  Vector f = row_factors();
  Vector c = canonical_rhs();
  for (std::size_t r = 0; r < c.size(); ++r) c[r] *= f[r];
  return c;
}

bool WeightedDASystem::unit_weights() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const DARow& r) { return r.weight == 1.0 && r.scale == 1.0; });
}

WeightedDASystem make_da_system(std::size_t n_vars, std::vector<DARow> rows) {
  WeightedDASystem s;
  s.n_vars = n_vars;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto& row = rows[r];
    const bool avg = row.kind == DAKind::average;
    if (row.i >= n_vars || row.j >= n_vars || (avg && row.k >= n_vars)) {
      throw std::invalid_argument("DA row " + std::to_string(r) + ": variable out of range");
    }
    if (row.i == row.j || (avg && (row.k == row.i || row.k == row.j))) {
      throw std::invalid_argument("DA row " + std::to_string(r) + ": variables must be distinct");
    }
    if (!(row.weight > 0.0) || !(row.scale > 0.0)) {
      throw std::invalid_argument("DA row " + std::to_string(r) + ": weight and scale must be positive");
    }
    row.source_row = r;
  }
  s.rows = std::move(rows);
  s.n_main = s.rows.size();
  return s;
}

namespace {

// A row that is c * (pattern) for a power-of-two c; fills kind/i/j/k/scale.
bool match_scaled_da(const Coeffs& row, DARow& out) {
  std::vector<std::pair<std::size_t, std::int64_t>> pos, neg;
  for (auto [var, c] : row) (c > 0 ? pos : neg).push_back({var, c});
  if (pos.size() == 1 && neg.size() == 1 && pos[0].second == -neg[0].second) {
    out.kind = DAKind::difference;
    out.i = pos[0].first;
    out.j = neg[0].first;
    out.scale = static_cast<double>(pos[0].second);
    return true;
  }
  auto average = [&](const auto& two, const auto& one, double sign) {
    if (two.size() != 2 || one.size() != 1) return false;
    const std::int64_t c = std::llabs(two[0].second);
    if (std::llabs(two[1].second) != c || std::llabs(one[0].second) != 2 * c) return false;
    out.kind = DAKind::average;
    out.i = two[0].first;
    out.j = two[1].first;
    out.k = one[0].first;
    out.scale = static_cast<double>(c) * sign;
    return true;
  };
  return average(pos, neg, 1.0) || average(neg, pos, -1.0);
}

}  // namespace

DAReduction gz2_to_da(const GeneralSystem& sys, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("gz2_to_da: alpha must be positive");
  if (sys.tag != SystemClass::G_z2) throw std::invalid_argument("gz2_to_da: class G_z2 input required");
  check_class(sys);

  const std::size_t m = sys.a.rows();
  const std::size_t n = sys.a.cols();
  auto rows = integer_rows(sys.a);

  DAReduction out;
  out.trace.n_original = n;
  out.trace.row_weight.assign(m, 0.0);
  out.trace.aux_rows.assign(m, 0);

  std::vector<DARow> main_rows;
  std::vector<DARow> aux_rows;
  std::size_t next_var = n;

  for (std::size_t i = 0; i < m; ++i) {
    const double c = sys.b[i];
    DARow kept;
    kept.source_row = i;
    if (match_scaled_da(rows[i], kept) && (kept.kind == DAKind::difference || c == 0.0)) {
      // already a (scaled) difference or a homogeneous (scaled) average
      kept.weight = alpha / (alpha + 1.0);
      kept.rhs = c / kept.scale;
      if (kept.scale < 0.0) {
        kept.scale = -kept.scale;
      }
      out.trace.row_weight[i] = kept.weight;
      main_rows.push_back(kept);
      continue;
    }

    Coeffs cur = rows[i];
    std::vector<DARow> created;
    for (int s : {-1, +1}) {
      for (unsigned r = 0;; ++r) {
        std::vector<std::size_t> side;
        for (auto [var, coef] : cur) {
          if ((coef > 0 ? 1 : -1) == s) side.push_back(var);
        }
        if (side.size() <= 1) break;
        std::vector<std::size_t> odd;
        for (std::size_t var : side) {
          if ((std::llabs(cur[var]) >> r) & 1) odd.push_back(var);
        }
        if (odd.size() % 2 != 0) {
          throw std::logic_error("gz2_to_da: odd number of variables at bit " + std::to_string(r) +
                                 " in row " + std::to_string(i));
        }
        const std::int64_t step = std::int64_t{1} << r;
        for (std::size_t p = 0; p + 1 < odd.size(); p += 2) {
          const std::size_t ju = odd[p];
          const std::size_t lu = odd[p + 1];
          const std::size_t tv = next_var++;
          // A_i += s 2^r (-u_j - u_l + 2 u_t)
          cur[ju] -= s * step;
          cur[lu] -= s * step;
          cur[tv] = 2 * s * step;
          if (cur[ju] == 0) cur.erase(ju);
          if (cur[lu] == 0) cur.erase(lu);
          DARow aux;
          aux.kind = DAKind::average;
          aux.i = ju;
          aux.j = lu;
          aux.k = tv;
          aux.scale = static_cast<double>(step);
          aux.rhs = 0.0;
          aux.source_row = i;
          created.push_back(aux);
          out.trace.aux.push_back({tv, ju, lu, s, r, i});
        }
      }
    }

    DARow main;
    main.source_row = i;
    if (!match_scaled_da(cur, main) || main.kind != DAKind::difference) {
      throw std::logic_error("gz2_to_da: row " + std::to_string(i) + " did not reduce to a difference");
    }
    main.weight = 1.0;
    main.rhs = c / main.scale;
    main_rows.push_back(main);

    const double w = alpha * static_cast<double>(created.size());
    for (auto& aux : created) aux.weight = w;
    out.trace.row_weight[i] = w;
    out.trace.aux_rows[i] = created.size();
    aux_rows.insert(aux_rows.end(), created.begin(), created.end());
  }

  auto& da = out.system;
  da.n_vars = next_var;
  da.n_main = main_rows.size();
  da.n_aux = aux_rows.size();
  da.rows = std::move(main_rows);
  da.rows.insert(da.rows.end(), aux_rows.begin(), aux_rows.end());
  out.rhs = da.rhs_vector();
  return out;
}

BackMap da_back_map(const GeneralSystem& sys, std::size_t n_da_vars) {
  Vector atb = matvec_transpose(sys.a, sys.b);
  if (norm_inf(atb) == 0.0) return BackMap::zero(n_da_vars, sys.a.cols(), "da");
  return BackMap::leading(n_da_vars, sys.a.cols(), "da");
}

Vector map_da_solution_back(const GeneralSystem& sys, std::span<const double> xb) {
  return da_back_map(sys, xb.size()).apply(xb);
}

double choose_epsilon_da(double eps_a, const GeneralSystem& sys) {
  if (!(eps_a > 0.0 && eps_a < 1.0)) throw std::invalid_argument("choose_epsilon_da: eps must lie in (0,1)");
  const double bnorm = norm2(sys.b);
  if (bnorm == 0.0) return eps_a;
  const double nm = static_cast<double>(sys.a.rows()) * static_cast<double>(sys.a.cols());
  return eps_a / (std::sqrt(nm) * sys.a.max_abs() * bnorm);
}

}  // namespace sle
