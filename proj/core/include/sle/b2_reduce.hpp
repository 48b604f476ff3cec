#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "sle/back_map.hpp"
#include "sle/complex2.hpp"
#include "sle/da_reduce.hpp"
#include "sle/sparse_matrix.hpp"

namespace sle {

/// One tube: the six triangles joining a hole of a variable's sphere to an equation's loop.
struct TubeRecord {
  std::size_t q = 0;
  std::size_t variable = 0;
  unsigned copy = 0;  // 0, or 1 for the second tube of a doubled average variable
  int sign = 1;
  std::array<std::size_t, 6> triangles{};
  std::array<std::size_t, 3> loop_triangle{};  // triangle holding loop edge r = 1,2,3
};

struct BoundaryProblem {
  Complex2 complex;
  SparseMatrix d2;                    // m x t, integer
  Vector gamma;                       // canonical rhs on loop edges, 0 elsewhere
  Vector weights;                     // diagonal of W, one entry per edge
  std::vector<std::size_t> central;   // per variable
  std::vector<TubeRecord> tubes;
  std::vector<DAKind> equation_kind;  // per equation
  Vector loop_factor;                 // per equation: sqrt(weight) * scale of the DA row
  std::size_t n_variables = 0;
  std::size_t n_equations = 0;
  std::size_t da_nnz = 0;             // nnz of the canonical DA matrix
  double da_l1 = 0.0;                 // sum of |entries| of the canonical DA matrix

  SparseMatrix weighted_d2() const;   // W^{1/2} d2
  Vector weighted_gamma() const;      // W^{1/2} gamma
  bool unit_weights() const;
  BackMap back_map(bool zero_solution) const;
};

/**
 * Encodes a DA system as a 2-complex boundary problem. b is the canonical
 * right-hand side (one entry per DA row). Rows with non-unit weight or scale
 * put weight (sqrt(w)*scale)^2 on their three loop edges.
 */
BoundaryProblem reduce_da_to_b2(const WeightedDASystem& sys, std::span<const double> b);
BoundaryProblem reduce_da_to_b2(const WeightedDASystem& sys);

/// x(i) = f(central triangle of i); zero when A^T b = 0.
Vector map_soln_b2_to_da(const SparseMatrix& a, std::span<const double> b,
                         std::span<const double> f, std::span<const std::size_t> central);
Vector map_soln_b2_to_da(const WeightedDASystem& sys, const BoundaryProblem& p,
                         std::span<const double> f);

double epsilon_feasible(double eps_da, std::size_t nnz_a);

struct TrianglePath {
  std::size_t q = 0;
  std::size_t tube = 0;
  std::vector<std::size_t> triangles;  // central ... target
  std::vector<std::size_t> edges;      // shared edges, triangles.size() - 1 of them
};

struct PathKCount {
  std::size_t q;
  std::size_t edge;
  std::size_t count;
};

struct PathWeights {
  double alpha = 0.0;
  std::vector<TrianglePath> paths;
  std::vector<double> path_length_sum;  // l_q
  std::vector<PathKCount> k;            // k_{q,e} > 0, sorted by (q, edge)
  Vector weights;                       // W diagonal
  std::size_t zero_interior = 0;        // interior edges on no path
};

struct EdgeWeightOptions {
  double alpha = 1.0;
  bool fill_zero = false;
  double zero_fill_factor = 1e-6;  // zero interior weights become alpha * factor
};

/**
 * Shortest-path-tree weights. Per group a BFS over interior-edge adjacency is
 * rooted at the central triangle; triangles holding a loop edge are leaves
 * (never expanded). Interior edge e gets alpha * sum_q k_{q,e} l_q rho_q^2,
 * loop edges get rho_q^2 with rho_q the DA row factor.
 */
PathWeights compute_edge_weights(const BoundaryProblem& p, const EdgeWeightOptions& opts);

struct RegReduction {
  BoundaryProblem problem;  // weights filled in
  PathWeights paths;
  double alpha = 0.0;
  double eps_b2 = 0.0;
  double eps_formula = 0.0;  // the sqrt(3(1 + ...)) bound before taking the min
  bool integer_rhs = false;
};

/// alpha = 2/eps_da^2 unless alpha_override > 0;
/// eps_b2 = min(eps_da / sqrt(3(1 + ||b||^2 nnz(A) max|A|^2 / alpha)), eps_da / 10).
RegReduction reduce_reg(const WeightedDASystem& sys, std::span<const double> b, double eps_da,
                        double alpha_override = 0.0, bool fill_zero = false);

struct SizeReport {
  std::size_t t = 0, m = 0, nnz_d2 = 0, nnz_a = 0;
  double l1 = 0.0;
  std::size_t n = 0;
  bool exact_t = false;      // t = 11 ||A||_1 - 4n
  bool t_bound = false;      // t <= 22 nnz
  bool m_bound = false;      // m <= 33 nnz
  bool nnz_matches = false;  // nnz(d2) = 3t
  bool ok() const { return exact_t && t_bound && m_bound && nnz_matches; }
};

SizeReport size_report(const BoundaryProblem& p);

struct SpectralCertificate {
  double lambda_max = 0.0;       // of d2^T d2
  double lambda_min = 0.0;       // smallest nonzero eigenvalue of d2^T d2
  double kappa_d2 = 0.0;
  double kappa_a = 0.0;
  double lambda_min_a = 0.0;     // smallest nonzero eigenvalue of A^T A
  double kappa_bound = 0.0;      // 1e9 nnz^{9/2} kappa(A)^2
  double lambda_min_bound = 0.0; // min(lambda_min(A^T A)^2, 1) / (1e16 d^7)
  std::size_t nullity_d2 = 0;
  std::size_t nullity_a = 0;
  bool lambda_max_ok = false;
  bool kappa_ok = false;
  bool lambda_min_ok = false;
  bool nullity_ok = false;
  bool ok() const { return lambda_max_ok && kappa_ok && lambda_min_ok && nullity_ok; }
};

inline constexpr double kEigenSlack = 1e-8;

/// Dense certificate; a is the canonical DA matrix. Throws SizeGuardError when t > dense_limit.
SpectralCertificate spectral_certificate(const BoundaryProblem& p, const SparseMatrix& a,
                                         std::size_t dense_limit = 3000);

}  // namespace sle
