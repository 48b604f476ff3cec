#include "sle/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sle/least_squares.hpp"

namespace sle {

const char* to_string(Stage s) {
  switch (s) {
    case Stage::gz: return "gz";
    case Stage::gz2: return "gz2";
    case Stage::da: return "da";
    case Stage::b2: return "b2";
    case Stage::b2w: return "b2w";
  }
  return "?";
}

Stage parse_stage(const std::string& name) {
  for (Stage s : {Stage::gz, Stage::gz2, Stage::da, Stage::b2, Stage::b2w}) {
    if (name == to_string(s)) return s;
  }
  throw std::invalid_argument("unknown stage '" + name + "'");
}

SparseMatrix Chain::target_matrix() const {
  switch (target) {
    case Stage::gz: return gz.a;
    case Stage::gz2: return gz2.a;
    case Stage::da: return da.system.as_matrix();
    case Stage::b2: return b2.d2;
    case Stage::b2w: return b2.weighted_d2();
  }
  throw std::logic_error("Chain: bad stage");
}

Vector Chain::target_rhs() const {
  switch (target) {
    case Stage::gz: return gz.b;
    case Stage::gz2: return gz2.b;
    case Stage::da: return da.rhs;
    case Stage::b2: return b2.gamma;
    case Stage::b2w: return b2.weighted_gamma();
  }
  throw std::logic_error("Chain: bad stage");
}

double Chain::target_eps() const {
  switch (target) {
    case Stage::gz:
    case Stage::gz2: return eps_da;
    case Stage::da: return eps_da;
    case Stage::b2:
    case Stage::b2w: return eps_b2;
  }
  return eps_b2;
}

Chain build_chain(const GeneralSystem& sys, const ChainOptions& opts) {
  if (!(opts.eps > 0.0 && opts.eps < 1.0)) throw std::invalid_argument("build_chain: eps must lie in (0,1)");
  if (!(opts.alpha > 0.0)) throw std::invalid_argument("build_chain: alpha must be positive");
  check_class(sys);

  Chain c;
  c.original = sys;
  c.target = opts.target;
  c.alpha = opts.alpha;

  StageResult z = to_zero_rowsum(sys);
  c.gz = z.system;
  std::vector<BackMap> down{z.back_map};  // original-side first; reversed at the end
  StageResult z2 = to_pow2(c.gz);
  c.gz2 = z2.system;
  down.push_back(z2.back_map);

  // dropping the padding pair adds g * (x_{n+1} - x_{n+2}) to the residual,
  // and that difference is itself a residual entry of the fresh row
  double eps_z2 = opts.eps;
  if (opts.policy == EpsilonPolicy::certified) {
    eps_z2 = choose_epsilon_da(opts.eps, c.gz2);
  } else if (c.gz2.a.cols() == c.gz.a.cols() + 2) {
    const SparseMatrix g = c.gz2.a.select_columns(std::vector<std::size_t>{c.gz.a.cols()});
    eps_z2 = opts.eps / (1.0 + g.frobenius_norm());
  }
  c.eps_da = eps_z2;

  if (opts.target == Stage::gz || opts.target == Stage::gz2) {
    if (opts.target == Stage::gz) down.pop_back();
    c.maps.assign(down.rbegin(), down.rend());
    return c;
  }

  c.da = gz2_to_da(c.gz2, opts.alpha);
  down.push_back(da_back_map(c.gz2, c.da.system.n_vars));
  // a DA-level eps solution loses at most sqrt((alpha+1)/alpha) on the main block
  c.eps_da = opts.policy == EpsilonPolicy::certified
                 ? eps_z2
                 : eps_z2 * std::sqrt(opts.alpha / (opts.alpha + 1.0));

  if (opts.target == Stage::da) {
    c.eps_b2 = c.eps_da;
    c.maps.assign(down.rbegin(), down.rend());
    return c;
  }

  const Vector b = c.da.system.canonical_rhs();
  if (opts.target == Stage::b2) {
    c.b2 = reduce_da_to_b2(c.da.system, b);
    c.eps_b2 = opts.policy == EpsilonPolicy::certified ? epsilon_feasible(c.eps_da, c.da.system.pattern_matrix().nnz())
                                                        : c.eps_da / std::sqrt(3.0);
  } else {
    RegReduction reg = reduce_reg(c.da.system, b, c.eps_da,
                                  opts.policy == EpsilonPolicy::certified ? 0.0 : opts.alpha);
    c.b2 = std::move(reg.problem);
    c.paths = std::move(reg.paths);
    c.alpha = reg.alpha;
    c.eps_b2 = opts.policy == EpsilonPolicy::certified
                   ? reg.eps_b2
                   : c.eps_da / (std::sqrt(3.0) * std::sqrt((reg.alpha + 1.0) / reg.alpha));
  }
  const bool zero = norm_inf(matvec_transpose(c.da.system.as_matrix(), c.da.rhs)) == 0.0;
  down.push_back(c.b2.back_map(zero));
  c.maps.assign(down.rbegin(), down.rend());
  return c;
}

ChainSolve solve_mapped(const SparseMatrix& a, std::span<const double> rhs,
                        const std::vector<BackMap>& maps, const GeneralSystem& original,
                        double target_eps, double user_eps, std::size_t max_attempts) {
  ChainSolve out;
  double tol = std::clamp(target_eps, 1e-15, 0.5);
  for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
    // the problem is consistent whenever the original one is, so stop on the
    // residual alone; the ||A|| ||x|| term is loose for the heavily weighted rows
    LsqrOptions lo;
    lo.btol = tol;
    lo.atol = 1e-15;
    lo.max_iter = std::max<std::size_t>(20000, 50 * (a.rows() + a.cols()));
    LsqrOutcome r = lsqr(a, rhs, lo);
    out.iterations += r.iterations;
    out.attempts = attempt;
    out.eps_used = tol;
    out.x = apply_chain(maps, r.x);
    out.target_x = std::move(r.x);
    out.relative_error = projection_residual(original.a, out.x, original.b).relative();
    out.certified = out.relative_error <= user_eps;
    if (out.certified || tol <= 1e-15) break;
    tol = std::max(tol / 10.0, 1e-15);
  }
  return out;
}

ChainSolve solve_chain(const Chain& chain, const ChainOptions& opts, std::size_t max_attempts) {
  const SparseMatrix a = chain.target_matrix();
  const Vector rhs = chain.target_rhs();
  return solve_mapped(a, rhs, chain.maps, chain.original, chain.target_eps(), opts.eps, max_attempts);
}

}  // namespace sle
