#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sle/b2_reduce.hpp"
#include "sle/da_reduce.hpp"

namespace sle {

enum class Stage { gz, gz2, da, b2, b2w };
const char* to_string(Stage s);
Stage parse_stage(const std::string& name);

/**
 * How the user accuracy is split across the chain.
 *
 * certified: the proven per-stage bounds (choose_epsilon_da, the weighted
 * formula of reduce_reg). These shrink fast and are usually below what
 * double precision can deliver.
 * consistent: tolerances that assume b is in the image of A, scaled by the
 * constant factors each stage loses; the final answer is checked against the
 * original system and the solve is retried with a tighter tolerance on failure.
 */
enum class EpsilonPolicy { consistent, certified };

struct ChainOptions {
  double eps = 1e-3;
  double alpha = 1.0;  // weight of the auxiliary DA rows and of the weighted B2 step
  EpsilonPolicy policy = EpsilonPolicy::consistent;
  Stage target = Stage::b2w;
};

struct Chain {
  GeneralSystem original;
  GeneralSystem gz;
  GeneralSystem gz2;
  DAReduction da;
  BoundaryProblem b2;   // b2 and b2w targets only
  PathWeights paths;    // b2w only
  Stage target = Stage::b2w;
  double eps_da = 0.0;
  double eps_b2 = 0.0;
  double alpha = 1.0;
  /// Solver-side first: maps[0] takes a solution of the target problem one stage down.
  std::vector<BackMap> maps;

  /// The least-squares problem posed at the target stage.
  SparseMatrix target_matrix() const;
  Vector target_rhs() const;
  /// Tolerance handed to the solver at the target stage.
  double target_eps() const;
};

Chain build_chain(const GeneralSystem& sys, const ChainOptions& opts);

struct ChainSolve {
  Vector x;                  // solution of the original system
  Vector target_x;           // solver output at the target stage
  double relative_error = 0.0;  // ||Ax - P_A b|| / ||P_A b|| on the original system
  double eps_used = 0.0;     // final solver tolerance at the target stage
  std::size_t attempts = 0;
  std::size_t iterations = 0;
  bool certified = false;    // relative_error <= opts.eps
};

/// LSQR on (a, rhs) at target_eps, mapped back and checked against the
/// original system; the tolerance is tightened 10x per failed attempt.
ChainSolve solve_mapped(const SparseMatrix& a, std::span<const double> rhs,
                        const std::vector<BackMap>& maps, const GeneralSystem& original,
                        double target_eps, double user_eps, std::size_t max_attempts = 5);

/// Iterative solve at the target stage, mapped back through every stage.
ChainSolve solve_chain(const Chain& chain, const ChainOptions& opts, std::size_t max_attempts = 5);

}  // namespace sle
