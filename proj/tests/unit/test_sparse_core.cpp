#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sle/least_squares.hpp"
#include "sle/spectral.hpp"

using namespace sle;

namespace {

SparseMatrix disk_boundary() {
  // columns [v1,v4,v2], [v2,v4,v3], [v1,v3,v4]; rows [12],[23],[13],[14],[24],[34]
  return SparseMatrix::from_triplets(6, 3,
                                     {{0, 0, -1}, {1, 1, -1}, {2, 2, 1}, {3, 0, 1}, {3, 2, -1},
                                      {4, 0, -1}, {4, 1, 1}, {5, 1, -1}, {5, 2, 1}});
}

// rows (1,-1)/sqrt2, (-1,1), (1,-1)/sqrt2: a reweighted pair of conflicting equations
SparseMatrix reweighted_pair() {
  const double s = 1.0 / std::sqrt(2.0);
  return SparseMatrix::from_triplets(3, 2, {{0, 0, s}, {0, 1, -s}, {1, 0, -1}, {1, 1, 1}, {2, 0, s}, {2, 1, -s}});
}

}  // namespace

TEST(SparseMatrix, CanonicalOrderSumsDuplicatesAndDropsZeros) {
  auto a = SparseMatrix::from_triplets(2, 3, {{1, 2, 4}, {0, 1, 2}, {0, 1, -2}, {1, 0, 1}, {1, 2, 1}});
  ASSERT_EQ(a.nnz(), 2u);
  auto t = a.triplets();
  EXPECT_EQ(t[0].row, 1u);
  EXPECT_EQ(t[0].col, 0u);
  EXPECT_EQ(t[1].col, 2u);
  EXPECT_EQ(t[1].value, 5.0);
  EXPECT_TRUE(a.is_integer());
  EXPECT_FALSE(SparseMatrix::from_triplets(1, 1, {{0, 0, 0.5}}).is_integer());
}

TEST(SparseMatrix, OutOfRangeTripletThrows) {
  EXPECT_THROW(SparseMatrix::from_triplets(2, 2, {{2, 0, 1}}), std::out_of_range);
}

TEST(Matvec, IdentityReturnsInput) {
  auto y = matvec(SparseMatrix::identity(2), Vector{3, -1});
  EXPECT_EQ(y, (Vector{3, -1}));
}

TEST(Matvec, DiskBoundaryTimesOnesGivesRowSums) {
  auto y = matvec(disk_boundary(), Vector{1, 1, 1});
  EXPECT_EQ(y, (Vector{-1, -1, 1, 0, 0, 0}));
}

TEST(Matvec, DimensionMismatchThrows) {
  EXPECT_THROW(matvec(SparseMatrix::identity(2), Vector{1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(matvec_transpose(SparseMatrix::identity(2), Vector{1}), std::invalid_argument);
}

TEST(Matvec, MatchesDenseOracleExactlyOnIntegers) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = oracle::random_integer_matrix(rng, 5, 4, 9);
    Vector x(4);
    std::uniform_int_distribution<int> v(-20, 20);
    for (double& e : x) e = v(rng);
    Eigen::VectorXd ref = oracle::dense(a) * oracle::vec(x);
    auto y = matvec(a, x);
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(y[i], ref(static_cast<Eigen::Index>(i)));
    auto yt = matvec_transpose(a, Vector(y.begin(), y.end()));
    Eigen::VectorXd reft = oracle::dense(a).transpose() * ref;
    for (std::size_t i = 0; i < yt.size(); ++i) EXPECT_EQ(yt[i], reft(static_cast<Eigen::Index>(i)));
  }
}

TEST(Matvec, RealValuesMatchDenseOracleRelative) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = oracle::random_integer_matrix(rng, 7, 6, 5).scaled(oracle::random_vector(rng, 7), {});
    auto x = oracle::random_vector(rng, 6);
    Eigen::VectorXd ref = oracle::dense(a) * oracle::vec(x);
    auto y = matvec(a, x);
    EXPECT_LE((oracle::vec(y) - ref).norm(), 1e-12 * std::max(1.0, ref.norm()));
  }
}

TEST(Multiply, IntegerProductIsExact) {
  std::mt19937_64 rng(7);
  auto a = oracle::random_integer_matrix(rng, 6, 5, 7);
  auto b = oracle::random_integer_matrix(rng, 5, 4, 7);
  Eigen::MatrixXd ref = oracle::dense(a) * oracle::dense(b);
  EXPECT_TRUE(oracle::dense(multiply(a, b)) == ref);
  EXPECT_TRUE(oracle::dense(a.transpose()) == oracle::dense(a).transpose());
}

TEST(Multiply, ProductIsZeroRequiresIntegers) {
  auto a = SparseMatrix::from_triplets(1, 1, {{0, 0, 0.5}});
  EXPECT_THROW(product_is_zero(a, a), std::invalid_argument);
}

TEST(Norms, ScaledNormHandlesHugeEntries) {
  Vector v{1e200, 1e200};
  EXPECT_DOUBLE_EQ(norm2(v), std::sqrt(2.0) * 1e200);
  EXPECT_EQ(norm_inf(Vector{-3, 2}), 3.0);
}

TEST(LeastSquares, IdentityReturnsRhs) {
  Vector b{1.5, -2, 7};
  auto r = least_squares(SparseMatrix::identity(3), b, 1e-10, 100);
  ASSERT_TRUE(r.converged);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.x[i], b[i], 1e-12);
  EXPECT_NEAR(r.residual_norm, 0.0, 1e-12);
}

TEST(LeastSquares, ReweightedPairKeepsHalfDifference) {
  const double s = 1.0 / std::sqrt(2.0);
  auto r = least_squares(reweighted_pair(), Vector{s, 0, s}, 1e-10, 1000);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0] - r.x[1], 0.5, 1e-9);
}

TEST(LeastSquares, AgreesWithPseudoInverse) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    auto a = oracle::random_integer_matrix(rng, 4, 3, 6, 0.8);
    auto b = oracle::random_vector(rng, 4);
    auto r = least_squares(a, b, 1e-10, 1000);
    ASSERT_TRUE(r.converged);
    Eigen::VectorXd ref = oracle::pinv_solve(oracle::dense(a), oracle::vec(b));
    EXPECT_LE((oracle::vec(r.x) - ref).norm(), 1e-8 * std::max(1.0, ref.norm()));
  }
}

TEST(LeastSquares, ConsistentSystemsReachRelativeTolerance) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = oracle::random_integer_matrix(rng, 8, 12, 5, 0.5);
    auto b = matvec(a, oracle::random_vector(rng, 12));
    auto r = least_squares(a, b, 1e-6, 5000);
    ASSERT_TRUE(r.converged);
    EXPECT_LE(r.residual_norm, 1e-6 * norm2(b));
  }
}

TEST(LeastSquares, ResidualDominatesProjectedResidual) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = oracle::random_integer_matrix(rng, 9, 4, 5, 0.5);
    auto b = oracle::random_vector(rng, 9);
    auto r = least_squares(a, b, 1e-8, 5000);
    EXPECT_GE(r.residual_norm * r.residual_norm,
              r.projected_residual_norm * r.projected_residual_norm - 1e-12 * norm2(b) * norm2(b));
    EXPECT_GE(r.projected_residual_norm, 0.0);
    EXPECT_GE(r.projected_rhs_norm, 0.0);
  }
}

TEST(LeastSquares, NonConvergenceIsFlagged) {
  std::mt19937_64 rng(11);
  auto a = oracle::random_integer_matrix(rng, 40, 30, 9, 0.4);
  auto b = oracle::random_vector(rng, 40);
  auto r = least_squares(a, b, 1e-12, 2);
  EXPECT_FALSE(r.converged);
}

TEST(LeastSquares, RejectsBadTolerance) {
  EXPECT_THROW(least_squares(SparseMatrix::identity(1), Vector{1}, 0.0, 10), std::invalid_argument);
  EXPECT_THROW(least_squares(SparseMatrix::identity(1), Vector{1}, 1.0, 10), std::invalid_argument);
  EXPECT_THROW(least_squares(SparseMatrix::identity(2), Vector{1}, 0.1, 10), std::invalid_argument);
}

TEST(ProjectionResidual, ExactSolutionInImage) {
  auto a = disk_boundary();
  Vector x{1, 2, -3};
  auto b = matvec(a, x);
  auto pr = projection_residual(a, x, b);
  EXPECT_NEAR(pr.residual, 0.0, 1e-12);
  EXPECT_NEAR(pr.rhs, norm2(b), 1e-12);
}

TEST(ProjectionResidual, ReweightedPairOptimumHasZeroResidual) {
  const double s = 1.0 / std::sqrt(2.0);
  auto pr = projection_residual(reweighted_pair(), Vector{0.5, 0}, Vector{s, 0, s});
  EXPECT_NEAR(pr.residual, 0.0, 1e-12);
}

TEST(ProjectionResidual, MatchesDenseProjector) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = oracle::random_integer_matrix(rng, 7, 5, 6, 0.5);
    auto b = oracle::random_vector(rng, 7);
    auto x = oracle::random_vector(rng, 5);
    Eigen::MatrixXd d = oracle::dense(a);
    Eigen::VectorXd p = oracle::project(d, oracle::vec(b));
    auto pr = projection_residual(a, x, b);
    EXPECT_NEAR(pr.residual, (d * oracle::vec(x) - p).norm(), 1e-8 * std::max(1.0, p.norm()));
    EXPECT_NEAR(pr.rhs, p.norm(), 1e-8 * std::max(1.0, p.norm()));
  }
}

TEST(Spectral, IdentityHasUnitSpectrum) {
  auto s = spectral_summary(SparseMatrix::identity(3), SpectralMode::dense_svd);
  EXPECT_NEAR(s.sigma_max, 1.0, 1e-14);
  EXPECT_NEAR(s.sigma_min_nonzero, 1.0, 1e-14);
  EXPECT_EQ(s.rank, 3u);
}

TEST(Spectral, DiskBoundaryHasFullColumnRank) {
  auto s = spectral_summary(disk_boundary(), SpectralMode::dense_svd);
  EXPECT_EQ(s.rank, 3u);
  EXPECT_EQ(static_cast<long>(s.rank), oracle::rank(oracle::dense(disk_boundary())));
  EXPECT_LE(s.sigma_max * s.sigma_max, 12.0);
}

TEST(Spectral, IterativeSigmaMaxWithinOnePercentOfDense) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = oracle::random_integer_matrix(rng, 12, 9, 8, 0.4);
    if (a.nnz() == 0) continue;
    auto dense = spectral_summary(a, SpectralMode::dense_svd);
    auto iter = spectral_summary(a, SpectralMode::iterative_estimate);
    EXPECT_NEAR(iter.sigma_max, dense.sigma_max, 0.01 * dense.sigma_max);
    EXPECT_FALSE(iter.sigma_min_available);
    EXPECT_EQ(iter.method, SpectralMode::iterative_estimate);
    EXPECT_NEAR(dense.sigma_max, oracle::singular_values(oracle::dense(a))(0), 1e-10 * dense.sigma_max);
  }
}

TEST(Spectral, SizeGuardRejectsLargeDenseRequests) {
  auto a = SparseMatrix::identity(50);
  EXPECT_THROW(spectral_summary(a, SpectralMode::dense_svd, 10), SizeGuardError);
  EXPECT_NO_THROW(spectral_summary(a, SpectralMode::iterative_estimate, 10));
}
