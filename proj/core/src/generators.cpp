#include "sle/generators.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <map>
#include <numeric>
#include <stdexcept>

#include "sle/spectral.hpp"

namespace sle {

namespace {

std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

std::int64_t pick_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

std::array<std::size_t, 3> distinct3(Rng& rng, std::size_t n) {
  std::size_t a = pick(rng, n), b, c;
  do b = pick(rng, n); while (b == a);
  do c = pick(rng, n); while (c == a || c == b);
  return {a, b, c};
}

std::vector<std::int64_t> split(Rng& rng, std::int64_t total, std::size_t parts) {
  // parts - 1 distinct cut points in [1, total - 1]
  std::vector<std::int64_t> cuts;
  while (cuts.size() + 1 < parts) {
    const std::int64_t c = pick_int(rng, 1, total - 1);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::int64_t> out;
  std::int64_t prev = 0;
  for (std::int64_t c : cuts) {
    out.push_back(c - prev);
    prev = c;
  }
  out.push_back(total - prev);
  return out;
}

}  // namespace

DAInstance random_da_instance(Rng& rng, const DAInstanceSpec& spec, bool planted) {
  if (spec.n < 3) throw std::invalid_argument("random_da_instance: need at least 3 variables");
  DAInstance inst;
  Vector x(spec.n, 0.0);
  if (planted) {
    for (double& v : x) v = static_cast<double>(pick_int(rng, -spec.rhs_bound, spec.rhs_bound));
    inst.planted = x;
  }
  std::bernoulli_distribution is_avg(spec.average_fraction);

  std::vector<DARow> rows;
  auto difference = [&](std::size_t i, std::size_t j) {
    DARow r;
    r.kind = DAKind::difference;
    r.i = i;
    r.j = j;
    r.rhs = planted ? x[i] - x[j] : static_cast<double>(pick_int(rng, -spec.rhs_bound, spec.rhs_bound));
    rows.push_back(r);
  };
  auto average = [&](std::size_t i, std::size_t j, std::size_t k) {
    DARow r;
    r.kind = DAKind::average;
    r.i = i;
    r.j = j;
    r.k = k;
    r.rhs = 0.0;
    rows.push_back(r);
  };
  auto try_average = [&]() {
    for (int attempt = 0; attempt < 50; ++attempt) {
      auto [i, j, k] = distinct3(rng, spec.n);
      if (!planted || x[i] + x[j] == 2.0 * x[k]) {
        average(i, j, k);
        return true;
      }
    }
    return false;
  };

  // cover every variable first with a random spanning pattern of differences
  std::vector<std::size_t> perm(spec.n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  for (std::size_t p = 0; p + 1 < spec.n && rows.size() < spec.d; p += 2) difference(perm[p], perm[p + 1]);
  if (spec.n % 2 == 1 && rows.size() < spec.d) difference(perm.back(), perm.front());
  while (rows.size() < spec.d) {
    if (is_avg(rng) && try_average()) continue;
    auto [i, j, k] = distinct3(rng, spec.n);
    (void)k;
    difference(i, j);
  }
  // a budget smaller than n/2 may leave variables untouched; pair them up
  std::vector<char> used(spec.n, 0);
  for (const auto& r : rows) {
    used[r.i] = used[r.j] = 1;
    if (r.kind == DAKind::average) used[r.k] = 1;
  }
  for (std::size_t v = 0; v < spec.n; ++v) {
    if (!used[v]) difference(v, v == 0 ? 1 : 0);
  }

  inst.system = make_da_system(spec.n, std::move(rows));
  inst.b = inst.system.canonical_rhs();
  return inst;
}

GeneralSystem random_general_system(Rng& rng, const GeneralInstanceSpec& spec) {
  if (spec.m > spec.n) throw std::invalid_argument("random_general_system: need m <= n");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Triplet> t;
    std::vector<char> col_used(spec.n, 0);
    for (std::size_t r = 0; r < spec.m; ++r) {
      const std::size_t k = std::uniform_int_distribution<std::size_t>(spec.row_nnz_min,
                                                                       std::min(spec.row_nnz_max, spec.n))(rng);
      std::vector<std::size_t> cols(spec.n);
      std::iota(cols.begin(), cols.end(), std::size_t{0});
      std::shuffle(cols.begin(), cols.end(), rng);
      for (std::size_t c = 0; c < k; ++c) {
        std::int64_t v = 0;
        while (v == 0) v = pick_int(rng, -spec.max_entry, spec.max_entry);
        t.push_back({r, cols[c], static_cast<double>(v)});
        col_used[cols[c]] = 1;
      }
    }
    // give untouched columns an entry so the class-G shape holds
    for (std::size_t c = 0; c < spec.n; ++c) {
      if (!col_used[c]) {
        std::int64_t v = 0;
        while (v == 0) v = pick_int(rng, -spec.max_entry, spec.max_entry);
        t.push_back({pick(rng, spec.m), c, static_cast<double>(v)});
      }
    }
    SparseMatrix a = SparseMatrix::from_triplets(spec.m, spec.n, std::move(t));
    SpectralSummary s = spectral_summary(a, SpectralMode::dense_svd);
    if (s.rank != spec.m || s.condition() > spec.kappa_limit) continue;
    GeneralSystem g;
    g.a = std::move(a);
    g.b.resize(spec.m);
    do {
      for (double& v : g.b) v = static_cast<double>(pick_int(rng, -spec.rhs_bound, spec.rhs_bound));
    } while (norm_inf(g.b) == 0.0);
    g.tag = SystemClass::G;
    return g;
  }
  throw std::runtime_error("random_general_system: no admissible draw in 1000 attempts");
}

GeneralSystem random_gz2_system(Rng& rng, std::size_t m, std::size_t n, std::int64_t max_entry) {
  if (n < 2) throw std::invalid_argument("random_gz2_system: need n >= 2");
  if (max_entry < 2) throw std::invalid_argument("random_gz2_system: need max_entry >= 2");
  const int max_log = static_cast<int>(std::bit_width(static_cast<std::uint64_t>(max_entry))) - 1;
  std::vector<Triplet> t;
  std::vector<char> col_used(n, 0);
  for (std::size_t r = 0; r < m; ++r) {
    // positive and negative sides each split the same power of two
    const std::int64_t total = std::int64_t{1} << pick_int(rng, 1, max_log);
    std::vector<std::size_t> cols(n);
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    std::shuffle(cols.begin(), cols.end(), rng);
    const std::size_t kp = std::min<std::size_t>({1 + pick(rng, 3), n - 1, static_cast<std::size_t>(total)});
    const std::size_t kn = std::min<std::size_t>({1 + pick(rng, 3), n - kp, static_cast<std::size_t>(total)});
    std::size_t next = 0;
    for (std::int64_t v : split(rng, total, kp)) {
      col_used[cols[next]] = 1;
      t.push_back({r, cols[next++], static_cast<double>(v)});
    }
    for (std::int64_t v : split(rng, total, kn)) {
      col_used[cols[next]] = 1;
      t.push_back({r, cols[next++], static_cast<double>(-v)});
    }
  }
  // columns left unused get a balanced +1/-1 row of their own
  std::size_t extra = m;
  std::vector<std::size_t> unused;
  for (std::size_t c = 0; c < n; ++c) {
    if (!col_used[c]) unused.push_back(c);
  }
  for (std::size_t u = 0; u < unused.size(); ++u) {
    const std::size_t other = u + 1 < unused.size() ? unused[u + 1] : (unused[u] == 0 ? 1 : 0);
    t.push_back({extra, unused[u], 1.0});
    t.push_back({extra, other, -1.0});
    ++extra;
    if (u + 1 < unused.size()) ++u;
  }
  GeneralSystem g;
  g.a = SparseMatrix::from_triplets(extra, n, std::move(t));
  g.b.resize(extra);
  for (double& v : g.b) v = static_cast<double>(pick_int(rng, -10, 10));
  g.tag = SystemClass::G_z2;
  check_class(g);
  return g;
}

}  // namespace sle
