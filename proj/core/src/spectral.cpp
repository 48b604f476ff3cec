#include "sle/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace sle {

Eigen::MatrixXd to_dense(const SparseMatrix& a) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.rows()),
                                            static_cast<Eigen::Index>(a.cols()));
  auto rp = a.row_ptr();
  auto ci = a.col_idx();
  auto v = a.values();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) {
      d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(ci[k])) = v[k];
    }
  }
  return d;
}

std::vector<double> singular_values(const SparseMatrix& a, std::size_t dense_limit) {
  const std::size_t small = std::min(a.rows(), a.cols());
  if (small > dense_limit || dense_limit > kDenseLimit) {
    throw SizeGuardError("dense spectral request on " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " exceeds limit " +
                         std::to_string(std::min(dense_limit, kDenseLimit)));
  }
  if (small == 0) return {};
  Eigen::MatrixXd d = to_dense(a);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(d);
  const auto& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

double rank_threshold(std::size_t rows, std::size_t cols, double sigma_max) {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() *
         sigma_max * 10.0;
}

double estimate_sigma_max(const SparseMatrix& a, std::uint64_t seed, std::size_t max_iter) {
  if (a.nnz() == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(a.cols());
  for (double& e : v) e = normal(rng);
  double nv = norm2(v);
  for (double& e : v) e /= nv;

  double lambda = 0.0;
  std::size_t stable = 0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    Vector av = matvec(a, v);
    const double next = dot(av, av);  // Rayleigh quotient of A^T A, nondecreasing
    Vector w = matvec_transpose(a, av);
    const double nw = norm2(w);
    if (nw == 0.0) return std::sqrt(next);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / nw;
    // a long plateau is required since a slowly growing quotient can look converged
    stable = (next - lambda <= 1e-12 * next) ? stable + 1 : 0;
    lambda = next;
    if (stable >= 25 && it >= 200) break;
  }
  return std::sqrt(lambda);
}

SpectralSummary spectral_summary(const SparseMatrix& a, SpectralMode mode,
                                 std::size_t dense_limit) {
  SpectralSummary s;
  s.method = mode;
  if (mode == SpectralMode::iterative_estimate) {
    s.sigma_max = estimate_sigma_max(a);
    s.sigma_min_nonzero = std::numeric_limits<double>::quiet_NaN();
    s.sigma_min_available = false;
    return s;
  }
  auto sv = singular_values(a, dense_limit);
  if (sv.empty() || sv.front() == 0.0) {
    s.sigma_min_nonzero = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  s.sigma_max = sv.front();
  const double tol = rank_threshold(a.rows(), a.cols(), s.sigma_max);
  for (double x : sv) {
    if (x > tol) {
      ++s.rank;
      s.sigma_min_nonzero = x;
    }
  }
  s.sigma_min_available = true;
  return s;
}

}  // namespace sle
