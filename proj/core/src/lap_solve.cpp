#include "sle/lap_solve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sle/least_squares.hpp"
#include "sle/spectral.hpp"

namespace sle {

OperatorSolveResult solve_boundary(const Complex2& k, std::span<const double> d, double delta,
                                   OperatorRoute route, const OperatorSolveOptions& opts) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("operator solve: delta must lie in (0,1)");
  const SparseMatrix d2 = boundary2(k);
  if (d.size() != d2.rows()) throw std::invalid_argument("operator solve: demand size mismatch");

  OperatorSolveResult res;
  res.f.assign(d2.cols(), 0.0);
  const double dnorm = norm2(d);
  if (dnorm == 0.0) {
    res.converged = true;
    res.note = "zero demand";
    return res;
  }

  const Vector pd = projection_estimate(d2, d);
  if (norm2(pd) <= 1e-10 * dnorm) {
    res.degenerate = true;
    res.converged = true;
    res.note = "demand is orthogonal to the boundary image";
    return res;
  }

  const SparseMatrix op = route == OperatorRoute::laplacian ? laplacian1(k)
                                                            : multiply(d2, d2.transpose());
  if (op.rows() <= opts.dense_limit && opts.dense_limit <= kDenseLimit) {
    SpectralSummary so = spectral_summary(op, SpectralMode::dense_svd, opts.dense_limit);
    SpectralSummary sd = spectral_summary(d2, SpectralMode::dense_svd, opts.dense_limit);
    res.sigma_min_operator = so.sigma_min_nonzero;
    res.sigma_max_d2 = sd.sigma_max;
    res.dense_spectrum = true;
    res.note = "dense spectrum";
  } else {
    if (!(opts.sigma_min_lower_bound > 0.0)) {
      throw SizeGuardError("operator solve: operator too large for a dense spectrum and no sigma_min bound given");
    }
    res.sigma_min_operator = opts.sigma_min_lower_bound;
    res.sigma_max_d2 = estimate_sigma_max(d2) * 1.01;
    res.note = "estimated sigma_max, supplied sigma_min bound";
  }

  res.inner_eps = delta * std::sqrt(res.sigma_min_operator) /
                  (res.sigma_max_d2 * res.sigma_max_d2 * dnorm);
  // below ~1e-15 the inner solve is limited by rounding, not by the tolerance
  const double tol = std::clamp(res.inner_eps, 1e-15, 0.5);
  LsqrOptions o;
  o.atol = tol;
  o.btol = tol;
  o.max_iter = opts.max_iter;
  LsqrOutcome inner = lsqr(op, d, o);
  res.iterations = inner.iterations;
  res.converged = inner.converged();
  res.f = matvec_transpose(d2, inner.x);

  Vector df = matvec(d2, res.f);
  res.certified_error = norm2(subtract(df, pd)) / norm2(pd);
  return res;
}

OperatorSolveResult solve_boundary_via_laplacian(const Complex2& k, std::span<const double> d,
                                                 double delta, const OperatorSolveOptions& opts) {
  return solve_boundary(k, d, delta, OperatorRoute::laplacian, opts);
}

OperatorSolveResult solve_boundary_via_gram(const Complex2& k, std::span<const double> d,
                                            double delta, const OperatorSolveOptions& opts) {
  return solve_boundary(k, d, delta, OperatorRoute::gram, opts);
}

}  // namespace sle
