#include "sle/complex2.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace sle {

namespace {

std::uint64_t edge_key(std::size_t u, std::size_t v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
}

}  // namespace

const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::loop: return "loop";
    case EdgeKind::interior: return "interior";
    case EdgeKind::free: return "free";
  }
  return "?";
}

std::size_t Complex2::add_edge(std::size_t u, std::size_t v, EdgeKind kind, std::size_t group,
                               std::size_t q, unsigned r) {
  if (u == v || u >= n_vertices || v >= n_vertices) {
    throw std::invalid_argument("add_edge: invalid endpoints");
  }
  auto key = edge_key(u, v);
  if (lookup_.count(key)) throw std::invalid_argument("add_edge: duplicate edge");
  lookup_[key] = edges.size();
  edges.push_back({u, v, kind, q, r, group});
  return edges.size() - 1;
}

std::size_t Complex2::ensure_edge(std::size_t u, std::size_t v, EdgeKind kind, std::size_t group) {
  if (auto e = find_edge(u, v)) return *e;
  return add_edge(std::min(u, v), std::max(u, v), kind, group);
}

std::size_t Complex2::add_triangle(std::size_t a, std::size_t b, std::size_t c, std::size_t group) {
  if (a >= n_vertices || b >= n_vertices || c >= n_vertices || a == b || b == c || a == c) {
    throw std::invalid_argument("add_triangle: invalid vertices");
  }
  triangles.push_back({{a, b, c}});
  if (group != kNoGroup) {
    group_of_triangle.resize(triangles.size() - 1, kNoGroup);
    group_of_triangle.push_back(group);
  }
  return triangles.size() - 1;
}

std::optional<std::size_t> Complex2::find_edge(std::size_t u, std::size_t v) const {
  if (u >= (std::size_t{1} << 32) || v >= (std::size_t{1} << 32)) return std::nullopt;
  auto it = lookup_.find(edge_key(u, v));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

void Complex2::reindex() {
  lookup_.clear();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!lookup_.emplace(edge_key(edges[e].u, edges[e].v), e).second) {
      throw std::invalid_argument("complex: duplicate edge {" + std::to_string(edges[e].u) + "," +
                                  std::to_string(edges[e].v) + "}");
    }
  }
}

std::array<std::pair<std::size_t, int>, 3> Complex2::triangle_edges(std::size_t tri) const {
  const auto& t = triangles.at(tri).v;
  std::array<std::pair<std::size_t, int>, 3> out{};
  for (int s = 0; s < 3; ++s) {
    std::size_t a = t[s];
    std::size_t b = t[(s + 1) % 3];
    auto e = find_edge(a, b);
    if (!e) {
      throw std::invalid_argument("triangle " + std::to_string(tri) + " references missing edge {" +
                                  std::to_string(a) + "," + std::to_string(b) + "}");
    }
    out[s] = {*e, edges[*e].u == a ? 1 : -1};
  }
  return out;
}

SparseMatrix boundary1(const Complex2& k) {
  std::vector<Triplet> t;
  t.reserve(2 * k.n_edges());
  for (std::size_t e = 0; e < k.n_edges(); ++e) {
    t.push_back({k.edges[e].u, e, -1.0});
    t.push_back({k.edges[e].v, e, 1.0});
  }
  return SparseMatrix::from_triplets(k.n_vertices, k.n_edges(), std::move(t));
}

SparseMatrix boundary2(const Complex2& k) {
  std::vector<Triplet> t;
  t.reserve(3 * k.n_triangles());
  for (std::size_t tri = 0; tri < k.n_triangles(); ++tri) {
    for (auto [e, sign] : k.triangle_edges(tri)) t.push_back({e, tri, static_cast<double>(sign)});
  }
  return SparseMatrix::from_triplets(k.n_edges(), k.n_triangles(), std::move(t));
}

SparseMatrix laplacian1(const Complex2& k) {
  SparseMatrix d1 = boundary1(k);
  SparseMatrix d2 = boundary2(k);
  return add(multiply(d1.transpose(), d1), multiply(d2, d2.transpose()));
}

ValidationReport validate(const Complex2& k) {
  auto fail = [](std::string msg) { return ValidationReport{false, std::move(msg)}; };

  for (std::size_t e = 0; e < k.n_edges(); ++e) {
    const auto& ed = k.edges[e];
    if (ed.u == ed.v || ed.u >= k.n_vertices || ed.v >= k.n_vertices) {
      return fail("edge " + std::to_string(e) + " has invalid endpoints");
    }
    auto found = k.find_edge(ed.u, ed.v);
    if (!found || *found != e) return fail("edge " + std::to_string(e) + " missing from lookup or duplicated");
  }

  std::vector<std::vector<std::pair<std::size_t, int>>> incid(k.n_edges());
  for (std::size_t tri = 0; tri < k.n_triangles(); ++tri) {
    const auto& v = k.triangles[tri].v;
    if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2] || v[0] >= k.n_vertices ||
        v[1] >= k.n_vertices || v[2] >= k.n_vertices) {
      return fail("triangle " + std::to_string(tri) + " has invalid vertices");
    }
    try {
      for (auto [e, sign] : k.triangle_edges(tri)) incid[e].push_back({tri, sign});
    } catch (const std::invalid_argument& ex) {
      return fail(ex.what());
    }
  }

  if (k.has_groups()) {
    if (k.group_of_triangle.size() != k.n_triangles()) return fail("group map does not cover every triangle");
    for (std::size_t tri = 0; tri < k.n_triangles(); ++tri) {
      if (k.group_of_triangle[tri] >= k.n_groups()) {
        return fail("triangle " + std::to_string(tri) + " has no central triangle for its group");
      }
    }
    for (std::size_t g = 0; g < k.n_groups(); ++g) {
      if (k.central[g] >= k.n_triangles() || k.group_of_triangle[k.central[g]] != g) {
        return fail("group " + std::to_string(g) + " has a missing or foreign central triangle");
      }
    }
  }

  for (std::size_t e = 0; e < k.n_edges(); ++e) {
    const auto& ed = k.edges[e];
    const auto& in = incid[e];
    const std::string id = "edge " + std::to_string(e) + " {" + std::to_string(ed.u) + "," +
                           std::to_string(ed.v) + "}";
    switch (ed.kind) {
      case EdgeKind::interior:
        if (in.size() != 2) return fail(id + ": interior edge in " + std::to_string(in.size()) + " triangles");
        if (in[0].second + in[1].second != 0) return fail(id + ": interior edge induced with equal signs");
        if (k.has_groups() && k.group_of_triangle[in[0].first] != k.group_of_triangle[in[1].first]) {
          return fail(id + ": interior edge joins two groups");
        }
        break;
      case EdgeKind::loop: {
        if (in.size() != 2 && in.size() != 4) {
          return fail(id + ": loop edge in " + std::to_string(in.size()) + " triangles");
        }
        int sum = 0;
        for (auto [tri, sign] : in) sum += sign;
        if (sum != 0) return fail(id + ": loop edge signs do not cancel");
        break;
      }
      case EdgeKind::free:
        if (in.size() > 1) return fail(id + ": free edge in " + std::to_string(in.size()) + " triangles");
        break;
    }
  }

  for (std::size_t q = 0; q < k.loops.size(); ++q) {
    const auto& lp = k.loops[q];
    for (unsigned r = 0; r < 3; ++r) {
      if (lp[r] >= k.n_edges()) return fail("loop " + std::to_string(q) + " references missing edge");
      const auto& a = k.edges[lp[r]];
      const auto& b = k.edges[lp[(r + 1) % 3]];
      if (a.kind != EdgeKind::loop || a.q != q || a.r != r + 1) {
        return fail("loop " + std::to_string(q) + " edge record mismatch");
      }
      if (a.v != b.u) return fail("loop " + std::to_string(q) + " is not consistently oriented");
    }
  }

  if (k.has_groups()) {
    // connectivity of each group over interior edges
    std::vector<std::vector<std::size_t>> adj(k.n_triangles());
    for (std::size_t e = 0; e < k.n_edges(); ++e) {
      if (k.edges[e].kind == EdgeKind::interior) {
        adj[incid[e][0].first].push_back(incid[e][1].first);
        adj[incid[e][1].first].push_back(incid[e][0].first);
      }
    }
    std::vector<char> seen(k.n_triangles(), 0);
    for (std::size_t g = 0; g < k.n_groups(); ++g) {
      std::deque<std::size_t> queue{k.central[g]};
      seen[k.central[g]] = 1;
      while (!queue.empty()) {
        std::size_t cur = queue.front();
        queue.pop_front();
        for (std::size_t nb : adj[cur]) {
          if (!seen[nb]) {
            seen[nb] = 1;
            queue.push_back(nb);
          }
        }
      }
    }
    for (std::size_t tri = 0; tri < k.n_triangles(); ++tri) {
      if (!seen[tri]) return fail("triangle " + std::to_string(tri) + " is disconnected from its central triangle");
    }
  }

  if (!product_is_zero(boundary1(k), boundary2(k))) return fail("boundary of boundary is nonzero");
  return {};
}

Complex2 four_vertex_disk() {
  Complex2 k;
  k.add_vertices(4);
  const std::size_t pairs[6][2] = {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {1, 3}, {2, 3}};
  const bool rim[6] = {true, true, true, false, false, false};
  for (int e = 0; e < 6; ++e) {
    k.add_edge(pairs[e][0], pairs[e][1], rim[e] ? EdgeKind::free : EdgeKind::interior);
  }
  k.add_triangle(0, 3, 1, 0);
  k.add_triangle(1, 3, 2, 0);
  k.add_triangle(0, 2, 3, 0);
  k.central = {0};
  return k;
}

Patch append_punctured_sphere(Complex2& k, std::size_t b, std::size_t group, EdgeKind hole_kind) {
  if (b == 0) throw std::invalid_argument("punctured sphere needs at least one hole");
  Patch p;
  const std::size_t first_triangle = k.n_triangles();
  std::size_t v0 = k.add_vertices(3);
  std::array<std::size_t, 3> base{v0, v0 + 1, v0 + 2};
  for (int s = 0; s < 3; ++s) k.ensure_edge(base[s], base[(s + 1) % 3], hole_kind, group);
  std::vector<std::array<std::size_t, 3>> tris{base};
  p.holes.push_back(base);

  for (std::size_t h = 1; h < b; ++h) {
    auto host = tris.back();
    tris.pop_back();
    const std::size_t x = host[0], y = host[1], z = host[2];
    const std::size_t w = k.add_vertices(3);
    const std::size_t w1 = w, w2 = w + 1, w3 = w + 2;
    // the host's rim keeps its orientation; the new hole w1 -> w3 -> w2 is carved inside
    const std::array<std::array<std::size_t, 3>, 6> ring{{
        {x, y, w1}, {w1, y, w2}, {y, z, w2}, {w2, z, w3}, {z, x, w3}, {w3, x, w1}}};
    for (auto [a, c] : {std::pair{w1, w2}, std::pair{w2, w3}, std::pair{w3, w1}}) {
      k.ensure_edge(a, c, hole_kind, group);
    }
    for (auto [a, c] : {std::pair{x, w1}, std::pair{y, w1}, std::pair{y, w2}, std::pair{z, w2},
                        std::pair{z, w3}, std::pair{x, w3}}) {
      k.ensure_edge(a, c, EdgeKind::interior, group);
    }
    tris.insert(tris.end(), ring.begin(), ring.end());
    p.holes.push_back({w1, w3, w2});
  }
  for (const auto& t : tris) k.add_triangle(t[0], t[1], t[2], group);
  p.central = first_triangle;
  return p;
}

Patch triangulate_punctured_sphere(std::size_t b) {
  Patch p;
  Patch built = append_punctured_sphere(p.complex, b, 0, EdgeKind::free);
  p.holes = std::move(built.holes);
  p.central = built.central;
  p.complex.central = {p.central};
  return p;
}

TubeTriangles append_tube(Complex2& k, const std::array<std::size_t, 3>& hole,
                          const std::array<std::size_t, 3>& loop, TubeMatch match,
                          std::size_t group, EdgeKind hole_kind, EdgeKind loop_kind) {
  // reversed hole cycle so the tube cancels the sphere on every hole edge
  const std::array<std::size_t, 3> rim{hole[0], hole[2], hole[1]};
  const std::array<std::size_t, 3> far = match == TubeMatch::opposite
                                             ? std::array<std::size_t, 3>{loop[0], loop[2], loop[1]}
                                             : loop;
  for (int s = 0; s < 3; ++s) k.ensure_edge(rim[s], rim[(s + 1) % 3], hole_kind, group);
  for (int s = 0; s < 3; ++s) {
    if (!k.find_edge(loop[s], loop[(s + 1) % 3])) {
      if (loop_kind == EdgeKind::loop) throw std::invalid_argument("append_tube: loop edge missing");
      k.add_edge(loop[s], loop[(s + 1) % 3], loop_kind, group);
    }
  }
  for (int s = 0; s < 3; ++s) {
    k.ensure_edge(rim[s], far[s], EdgeKind::interior, group);
    k.ensure_edge(rim[(s + 1) % 3], far[s], EdgeKind::interior, group);
  }

  TubeTriangles out{};
  for (int s = 0; s < 3; ++s) {
    const std::size_t p0 = rim[s], p1 = rim[(s + 1) % 3];
    const std::size_t a0 = far[s], a1 = far[(s + 1) % 3];
    out.triangles[2 * s] = k.add_triangle(p0, p1, a0, group);
    out.triangles[2 * s + 1] = k.add_triangle(a0, p1, a1, group);
    const std::size_t e = *k.find_edge(a0, a1);
    // position of this edge on the loop: {loop[r-1], loop[r]}
    for (unsigned r = 0; r < 3; ++r) {
      if (*k.find_edge(loop[r], loop[(r + 1) % 3]) == e) out.loop_triangle[r] = out.triangles[2 * s + 1];
    }
  }
  return out;
}

Patch triangulate_tube(TubeMatch match) {
  Patch p;
  Complex2& k = p.complex;
  k.add_vertices(6);
  const std::array<std::size_t, 3> hole{0, 1, 2};
  const std::array<std::size_t, 3> loop{3, 4, 5};
  for (int s = 0; s < 3; ++s) k.add_edge(loop[s], loop[(s + 1) % 3], EdgeKind::free, 0);
  TubeTriangles t = append_tube(k, hole, loop, match, 0, EdgeKind::free, EdgeKind::free);
  p.holes = {hole, loop};
  p.central = t.triangles[0];
  k.central = {p.central};
  return p;
}

}  // namespace sle
