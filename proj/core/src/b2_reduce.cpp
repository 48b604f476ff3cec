#include "sle/b2_reduce.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>

#include "sle/spectral.hpp"

namespace sle {

SparseMatrix BoundaryProblem::weighted_d2() const {
  Vector s(weights.size());
  for (std::size_t e = 0; e < s.size(); ++e) s[e] = std::sqrt(weights[e]);
  return d2.scaled(s, {});
}

Vector BoundaryProblem::weighted_gamma() const {
  Vector g = gamma;
  for (std::size_t e = 0; e < g.size(); ++e) g[e] *= std::sqrt(weights[e]);
  return g;
}

bool BoundaryProblem::unit_weights() const {
  return std::all_of(weights.begin(), weights.end(), [](double w) { return w == 1.0; });
}

BackMap BoundaryProblem::back_map(bool zero_solution) const {
  if (zero_solution) return BackMap::zero(d2.cols(), n_variables, "b2");
  return BackMap::select(d2.cols(), central, "b2");
}

namespace {

struct Incidence {
  std::size_t q;
  int sign;
  unsigned copy;
};

}  // namespace

BoundaryProblem reduce_da_to_b2(const WeightedDASystem& sys, std::span<const double> b) {
  const std::size_t d = sys.rows.size();
  const std::size_t n = sys.n_vars;
  if (b.size() != d) throw std::invalid_argument("reduce_da_to_b2: rhs size mismatch");

  BoundaryProblem p;
  p.n_variables = n;
  p.n_equations = d;
  p.equation_kind.resize(d);
  p.loop_factor = sys.row_factors();

  std::vector<std::vector<Incidence>> incid(n);
  for (std::size_t q = 0; q < d; ++q) {
    const auto& row = sys.rows[q];
    p.equation_kind[q] = row.kind;
    if (row.kind == DAKind::difference) {
      incid[row.i].push_back({q, +1, 0});
      incid[row.j].push_back({q, -1, 0});
      p.da_nnz += 2;
      p.da_l1 += 2.0;
    } else {
      if (b[q] != 0.0) {
        throw std::invalid_argument("reduce_da_to_b2: average row " + std::to_string(q) +
                                    " has nonzero right-hand side");
      }
      incid[row.i].push_back({q, +1, 0});
      incid[row.j].push_back({q, +1, 0});
      incid[row.k].push_back({q, -1, 0});
      incid[row.k].push_back({q, -1, 1});
      p.da_nnz += 3;
      p.da_l1 += 4.0;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (incid[i].empty()) {
      throw std::invalid_argument("reduce_da_to_b2: variable " + std::to_string(i) +
                                  " appears in no equation");
    }
  }

  Complex2& k = p.complex;
  // loops first: vertices 3q..3q+2, edges 3q..3q+2
  std::vector<std::array<std::size_t, 3>> loop_vertices(d);
  for (std::size_t q = 0; q < d; ++q) {
    const std::size_t a = k.add_vertices(3);
    loop_vertices[q] = {a, a + 1, a + 2};
  }
  k.loops.resize(d);
  for (std::size_t q = 0; q < d; ++q) {
    const auto& lv = loop_vertices[q];
    for (unsigned r = 0; r < 3; ++r) {
      k.loops[q][r] = k.add_edge(lv[r], lv[(r + 1) % 3], EdgeKind::loop, kNoGroup, q, r + 1);
    }
  }

  p.central.resize(n);
  k.central.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Patch sphere = append_punctured_sphere(k, incid[i].size(), i, EdgeKind::interior);
    p.central[i] = sphere.central;
    k.central[i] = sphere.central;
    for (std::size_t h = 0; h < incid[i].size(); ++h) {
      const auto& inc = incid[i][h];
      TubeTriangles tt = append_tube(k, sphere.holes[h], loop_vertices[inc.q],
                                     inc.sign > 0 ? TubeMatch::opposite : TubeMatch::identical, i,
                                     EdgeKind::interior, EdgeKind::loop);
      TubeRecord rec;
      rec.q = inc.q;
      rec.variable = i;
      rec.copy = inc.copy;
      rec.sign = inc.sign;
      rec.triangles = tt.triangles;
      rec.loop_triangle = tt.loop_triangle;
      p.tubes.push_back(rec);
    }
  }

  p.d2 = boundary2(k);
  p.gamma.assign(k.n_edges(), 0.0);
  p.weights.assign(k.n_edges(), 1.0);
  for (std::size_t q = 0; q < d; ++q) {
    const double rho2 = p.loop_factor[q] * p.loop_factor[q];
    for (std::size_t e : k.loops[q]) {
      p.gamma[e] = b[q];
      p.weights[e] = rho2;
    }
  }
  return p;
}

BoundaryProblem reduce_da_to_b2(const WeightedDASystem& sys) {
  Vector c = sys.canonical_rhs();
  return reduce_da_to_b2(sys, c);
}

Vector map_soln_b2_to_da(const SparseMatrix& a, std::span<const double> b,
                         std::span<const double> f, std::span<const std::size_t> central) {
  Vector atb = matvec_transpose(a, b);
  Vector x(central.size(), 0.0);
  if (norm_inf(atb) == 0.0) return x;
  for (std::size_t i = 0; i < central.size(); ++i) x[i] = f[central[i]];
  return x;
}

Vector map_soln_b2_to_da(const WeightedDASystem& sys, const BoundaryProblem& p,
                         std::span<const double> f) {
  if (f.size() != p.d2.cols()) throw std::invalid_argument("map_soln_b2_to_da: flow size mismatch");
  return map_soln_b2_to_da(sys.as_matrix(), sys.rhs_vector(), f, p.central);
}

double epsilon_feasible(double eps_da, std::size_t nnz_a) {
  if (nnz_a == 0) throw std::invalid_argument("epsilon_feasible: nnz must be positive");
  return eps_da / (42.0 * static_cast<double>(nnz_a));
}

PathWeights compute_edge_weights(const BoundaryProblem& p, const EdgeWeightOptions& opts) {
  if (!(opts.alpha > 0.0)) throw std::invalid_argument("compute_edge_weights: alpha must be positive");
  const Complex2& k = p.complex;
  const std::size_t t = k.n_triangles();
  const std::size_t m = k.n_edges();

  // triangle adjacency over interior edges, neighbors ascending by column
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(t);
  std::vector<char> has_loop(t, 0);
  {
    std::vector<std::vector<std::size_t>> by_edge(m);
    for (std::size_t tri = 0; tri < t; ++tri) {
      for (auto [e, sign] : k.triangle_edges(tri)) {
        by_edge[e].push_back(tri);
        if (k.edges[e].kind == EdgeKind::loop) has_loop[tri] = 1;
      }
    }
    for (std::size_t e = 0; e < m; ++e) {
      if (k.edges[e].kind != EdgeKind::interior) continue;
      if (by_edge[e].size() != 2) throw std::logic_error("compute_edge_weights: malformed interior edge");
      adj[by_edge[e][0]].push_back({by_edge[e][1], e});
      adj[by_edge[e][1]].push_back({by_edge[e][0], e});
    }
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());
  }

  const std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(t, none), parent_edge(t, none), depth(t, 0);
  std::vector<std::size_t> order;  // BFS order across all groups
  order.reserve(t);
  std::vector<char> seen(t, 0);
  for (std::size_t i = 0; i < p.n_variables; ++i) {
    const std::size_t root = p.central[i];
    seen[root] = 1;
    std::deque<std::size_t> queue{root};
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      order.push_back(cur);
      if (has_loop[cur]) continue;  // boundary triangles are leaves
      for (auto [nb, e] : adj[cur]) {
        if (seen[nb]) continue;
        seen[nb] = 1;
        parent[nb] = cur;
        parent_edge[nb] = e;
        depth[nb] = depth[cur] + 1;
        queue.push_back(nb);
      }
    }
  }

  PathWeights out;
  out.alpha = opts.alpha;
  out.path_length_sum.assign(p.n_equations, 0.0);
  for (std::size_t tb = 0; tb < p.tubes.size(); ++tb) {
    const std::size_t target = p.tubes[tb].loop_triangle[0];
    if (!seen[target]) throw std::logic_error("compute_edge_weights: group is disconnected");
    out.path_length_sum[p.tubes[tb].q] += static_cast<double>(depth[target]);
  }

  // bottom-up accumulation of sum over descendant targets of l_q rho_q^2
  Vector mass(t, 0.0);
  for (const auto& tube : p.tubes) {
    const double rho = p.loop_factor[tube.q];
    mass[tube.loop_triangle[0]] += out.path_length_sum[tube.q] * rho * rho;
  }
  out.weights.assign(m, 0.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t node = *it;
    if (parent[node] == none || mass[node] == 0.0) continue;
    out.weights[parent_edge[node]] += opts.alpha * mass[node];
    mass[parent[node]] += mass[node];
  }

  // explicit paths and k_{q,e}, reported for inspection
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> kcount;
  for (std::size_t tb = 0; tb < p.tubes.size(); ++tb) {
    TrianglePath path;
    path.q = p.tubes[tb].q;
    path.tube = tb;
    for (std::size_t node = p.tubes[tb].loop_triangle[0]; node != none; node = parent[node]) {
      path.triangles.push_back(node);
      if (parent[node] != none) {
        path.edges.push_back(parent_edge[node]);
        ++kcount[{path.q, parent_edge[node]}];
      }
    }
    std::reverse(path.triangles.begin(), path.triangles.end());
    std::reverse(path.edges.begin(), path.edges.end());
    out.paths.push_back(std::move(path));
  }
  for (const auto& [key, c] : kcount) out.k.push_back({key.first, key.second, c});

  for (std::size_t e = 0; e < m; ++e) {
    const auto& ed = k.edges[e];
    if (ed.kind == EdgeKind::loop) {
      out.weights[e] = p.loop_factor[ed.q] * p.loop_factor[ed.q];
    } else if (ed.kind == EdgeKind::interior && out.weights[e] == 0.0) {
      ++out.zero_interior;
      if (opts.fill_zero) out.weights[e] = opts.alpha * opts.zero_fill_factor;
    }
  }
  return out;
}

RegReduction reduce_reg(const WeightedDASystem& sys, std::span<const double> b, double eps_da,
                        double alpha_override, bool fill_zero) {
  if (!(eps_da > 0.0 && eps_da <= 1.0)) throw std::invalid_argument("reduce_reg: eps_da must lie in (0,1]");
  RegReduction out;
  out.problem = reduce_da_to_b2(sys, b);
  out.alpha = alpha_override > 0.0 ? alpha_override : 2.0 / (eps_da * eps_da);
  EdgeWeightOptions opts;
  opts.alpha = out.alpha;
  opts.fill_zero = fill_zero;
  out.paths = compute_edge_weights(out.problem, opts);
  out.problem.weights = out.paths.weights;

  SparseMatrix a = sys.as_matrix();
  Vector rhs = sys.rhs_vector();
  const double bn = norm2(rhs);
  const double amax = a.max_abs();
  out.eps_formula = eps_da / std::sqrt(3.0 * (1.0 + bn * bn * static_cast<double>(a.nnz()) *
                                                        amax * amax / out.alpha));
  out.eps_b2 = std::min(out.eps_formula, eps_da / 10.0);
  out.integer_rhs = std::all_of(rhs.begin(), rhs.end(), [](double v) { return v == std::nearbyint(v); });
  return out;
}

SizeReport size_report(const BoundaryProblem& p) {
  SizeReport r;
  r.t = p.d2.cols();
  r.m = p.d2.rows();
  r.nnz_d2 = p.d2.nnz();
  r.nnz_a = p.da_nnz;
  r.l1 = p.da_l1;
  r.n = p.n_variables;
  const double expected = 11.0 * r.l1 - 4.0 * static_cast<double>(r.n);
  r.exact_t = static_cast<double>(r.t) == expected;
  r.t_bound = r.t <= 22 * r.nnz_a;
  r.m_bound = r.m <= 33 * r.nnz_a;
  r.nnz_matches = r.nnz_d2 == 3 * r.t;
  return r;
}

SpectralCertificate spectral_certificate(const BoundaryProblem& p, const SparseMatrix& a,
                                         std::size_t dense_limit) {
  if (p.d2.cols() > dense_limit) {
    throw SizeGuardError("spectral certificate: t = " + std::to_string(p.d2.cols()) +
                         " exceeds dense limit " + std::to_string(dense_limit));
  }
  SpectralCertificate c;
  SpectralSummary sd = spectral_summary(p.d2, SpectralMode::dense_svd, dense_limit);
  SpectralSummary sa = spectral_summary(a, SpectralMode::dense_svd, dense_limit);
  c.lambda_max = sd.sigma_max * sd.sigma_max;
  c.lambda_min = sd.sigma_min_nonzero * sd.sigma_min_nonzero;
  c.kappa_d2 = sd.condition();
  c.kappa_a = sa.condition();
  c.lambda_min_a = sa.sigma_min_nonzero * sa.sigma_min_nonzero;
  const double nnz = static_cast<double>(a.nnz());
  const double d = static_cast<double>(a.rows());
  c.kappa_bound = 1e9 * std::pow(nnz, 4.5) * c.kappa_a * c.kappa_a;
  c.lambda_min_bound = std::min(c.lambda_min_a * c.lambda_min_a, 1.0) / (1e16 * std::pow(d, 7.0));
  c.nullity_d2 = sd.nullity(p.d2.cols());
  c.nullity_a = sa.nullity(a.cols());
  c.lambda_max_ok = c.lambda_max <= 12.0 * (1.0 + kEigenSlack);
  c.kappa_ok = c.kappa_d2 <= c.kappa_bound * (1.0 + kEigenSlack);
  c.lambda_min_ok = c.lambda_min >= c.lambda_min_bound * (1.0 - kEigenSlack);
  c.nullity_ok = c.nullity_d2 == c.nullity_a;
  return c;
}

}  // namespace sle
