#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sle/sparse_matrix.hpp"

namespace sle {

enum class EdgeKind {
  loop,      // carries the demand of one equation; lies in 2 or 4 triangles
  interior,  // shared by exactly two triangles of one group, opposite induced signs
  free,      // boundary of a standalone patch; lies in at most one triangle
};

const char* to_string(EdgeKind k);

struct EdgeRecord {
  std::size_t u = 0;  // oriented u -> v
  std::size_t v = 0;
  EdgeKind kind = EdgeKind::interior;
  std::size_t q = 0;  // equation index (loop edges)
  unsigned r = 0;     // 1..3 position on the loop (loop edges)
  std::size_t group = 0;
};

struct OrientedTriangle {
  std::array<std::size_t, 3> v{};
};

inline constexpr std::size_t kNoGroup = static_cast<std::size_t>(-1);

/**
 * Combinatorial oriented 2-complex.
 *
 * Triangle [a,b,c] induces the cycle a->b->c->a on its boundary; an edge
 * gets +1 in a triangle's column when its stored orientation agrees with
 * that cycle. Groups are optional: when present every triangle belongs to
 * exactly one group and each group has a designated central triangle.
 */
class Complex2 {
 public:
  std::size_t n_vertices = 0;
  std::vector<EdgeRecord> edges;
  std::vector<OrientedTriangle> triangles;
  std::vector<std::size_t> group_of_triangle;
  std::vector<std::size_t> central;
  std::vector<std::array<std::size_t, 3>> loops;  // per equation q, edge ids of r = 1,2,3

  std::size_t add_vertex() { return n_vertices++; }
  std::size_t add_vertices(std::size_t k) {
    std::size_t first = n_vertices;
    n_vertices += k;
    return first;
  }
  /// Adds an edge oriented u -> v. Throws if {u,v} already exists.
  std::size_t add_edge(std::size_t u, std::size_t v, EdgeKind kind, std::size_t group = 0,
                       std::size_t q = 0, unsigned r = 0);
  /// Returns the existing edge {u,v} or adds one oriented min -> max.
  std::size_t ensure_edge(std::size_t u, std::size_t v, EdgeKind kind, std::size_t group = 0);
  std::size_t add_triangle(std::size_t a, std::size_t b, std::size_t c,
                           std::size_t group = kNoGroup);

  std::optional<std::size_t> find_edge(std::size_t u, std::size_t v) const;
  /// Rebuilds the edge lookup after edges were edited directly.
  void reindex();

  std::size_t n_edges() const { return edges.size(); }
  std::size_t n_triangles() const { return triangles.size(); }
  std::size_t n_groups() const { return central.size(); }
  bool has_groups() const { return !group_of_triangle.empty(); }

  /// Edge ids of a triangle's sides (a,b), (b,c), (c,a) with their signs.
  std::array<std::pair<std::size_t, int>, 3> triangle_edges(std::size_t tri) const;

 private:
  std::unordered_map<std::uint64_t, std::size_t> lookup_;
};

SparseMatrix boundary1(const Complex2& k);
SparseMatrix boundary2(const Complex2& k);
SparseMatrix laplacian1(const Complex2& k);

struct ValidationReport {
  bool ok = true;
  std::string message;
  explicit operator bool() const { return ok; }
};

ValidationReport validate(const Complex2& k);

/// A standalone patch: the complex plus its boundary holes as induced cycles.
struct Patch {
  Complex2 complex;
  std::vector<std::array<std::size_t, 3>> holes;
  std::size_t central = 0;
};

/// Four vertices, three triangles [0,3,1], [1,3,2], [0,2,3]: a disk with the
/// six edges [0,1], [1,2], [0,2], [0,3], [1,3], [2,3] in that order.
Complex2 four_vertex_disk();

/// Appends a sphere with b triangular holes to k (3b vertices, 5b-4
/// triangles, 9b-6 edges). Holes are returned as the cycles induced by the
/// adjacent sphere triangles. Hole edges get hole_kind.
Patch append_punctured_sphere(Complex2& k, std::size_t b, std::size_t group, EdgeKind hole_kind);
Patch triangulate_punctured_sphere(std::size_t b);

enum class TubeMatch {
  opposite,   // positive coefficient: the tube induces +loop orientation
  identical,  // negative coefficient: the tube induces -loop orientation
};

struct TubeTriangles {
  std::array<std::size_t, 6> triangles;     // T1_0, T2_0, T1_1, T2_1, T1_2, T2_2
  std::array<std::size_t, 3> loop_triangle;  // triangle holding loop edge r = 1,2,3
};

/**
 * Joins a hole (cycle induced by its sphere) to a loop a0 -> a1 -> a2 with
 * six triangles and six connecting edges. Loop edges must already exist when
 * loop_kind is EdgeKind::loop; otherwise they are created with loop_kind.
 */
TubeTriangles append_tube(Complex2& k, const std::array<std::size_t, 3>& hole,
                          const std::array<std::size_t, 3>& loop, TubeMatch match,
                          std::size_t group, EdgeKind hole_kind, EdgeKind loop_kind);
Patch triangulate_tube(TubeMatch match);

}  // namespace sle
