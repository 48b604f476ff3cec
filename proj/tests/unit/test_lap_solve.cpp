#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sle/b2_reduce.hpp"
#include "sle/generators.hpp"
#include "sle/lap_solve.hpp"
#include "sle/spectral.hpp"

using namespace sle;

namespace {

std::vector<Complex2> tiny_complexes() {
  std::vector<Complex2> out{four_vertex_disk(), triangulate_punctured_sphere(4).complex,
                            triangulate_tube(TubeMatch::opposite).complex};
  Rng rng(21);
  for (std::size_t n : {3u, 5u}) {
    DAInstanceSpec s;
    s.n = n;
    s.d = n + 2;
    auto inst = random_da_instance(rng, s, false);
    out.push_back(reduce_da_to_b2(inst.system, inst.b).complex);
  }
  return out;
}

Vector integer_demand(Rng& rng, std::size_t m) {
  std::uniform_int_distribution<int> u(-5, 5);
  Vector d(m);
  for (auto& v : d) v = u(rng);
  if (norm_inf(d) == 0.0) d[0] = 1.0;
  return d;
}

constexpr OperatorRoute kRoutes[] = {OperatorRoute::laplacian, OperatorRoute::gram};

}  // namespace

TEST(BoundarySolve, FeasibleDemandBothRoutes) {
  Rng rng(1);
  const double delta = 1e-6;
  for (const auto& k : tiny_complexes()) {
    auto d2 = boundary2(k);
    Vector f0(d2.cols());
    std::uniform_int_distribution<int> u(-3, 3);
    for (auto& v : f0) v = u(rng);
    if (norm_inf(f0) == 0.0) f0[0] = 1.0;
    auto d = matvec(d2, f0);
    for (auto route : kRoutes) {
      auto r = solve_boundary(k, d, delta, route);
      ASSERT_TRUE(r.converged);
      EXPECT_TRUE(r.dense_spectrum);
      EXPECT_FALSE(r.degenerate);
      EXPECT_LE(norm2(subtract(matvec(d2, r.f), d)), delta * norm2(d));
    }
  }
}

TEST(BoundarySolve, GradientDemandIsDegenerate) {
  Rng rng(2);
  for (const auto& k : tiny_complexes()) {
    auto d1 = boundary1(k);
    auto y = oracle::random_vector(rng, k.n_vertices);
    y[0] += 1.0;
    auto d = matvec_transpose(d1, y);
    if (norm2(d) == 0.0) continue;
    for (auto route : kRoutes) {
      auto r = solve_boundary(k, d, 1e-4, route);
      EXPECT_TRUE(r.degenerate);
      EXPECT_EQ(norm_inf(r.f), 0.0);
    }
  }
}

TEST(BoundarySolve, AgreesWithDensePseudoInverse) {
  Rng rng(3);
  const double delta = 1e-5;
  for (const auto& k : tiny_complexes()) {
    Eigen::MatrixXd d2 = oracle::dense(boundary2(k));
    for (int s = 0; s < 3; ++s) {
      auto d = integer_demand(rng, k.n_edges());
      Eigen::VectorXd pd = oracle::project(d2, oracle::vec(d));
      if (pd.norm() < 1e-9) continue;
      Eigen::VectorXd f_star = oracle::pinv_solve(d2, oracle::vec(d));
      for (auto route : kRoutes) {
        auto r = solve_boundary(k, d, delta, route);
        ASSERT_TRUE(r.converged);
        Eigen::VectorXd f = oracle::vec(r.f);
        EXPECT_LE((d2 * f - pd).norm(), delta * pd.norm());
        EXPECT_LE((d2 * (f - f_star)).norm(), delta * pd.norm());
        EXPECT_NEAR(r.certified_error, (d2 * f - pd).norm() / pd.norm(), 1e-8);
      }
    }
  }
}

TEST(BoundarySolve, RoutesAgreeWithinTwoDelta) {
  Rng rng(4);
  const double delta = 1e-3;
  for (const auto& k : tiny_complexes()) {
    auto d2 = boundary2(k);
    auto d = integer_demand(rng, k.n_edges());
    auto a = solve_boundary_via_laplacian(k, d, delta);
    auto b = solve_boundary_via_gram(k, d, delta);
    if (a.degenerate) continue;
    Eigen::VectorXd pd = oracle::project(oracle::dense(d2), oracle::vec(d));
    EXPECT_LE(norm2(matvec(d2, subtract(a.f, b.f))), 2.0 * delta * pd.norm());
  }
}

TEST(BoundarySolve, ImageOfCoboundaryIsOrthogonalToBoundaryImage) {
  for (const auto& k : tiny_complexes()) {
    Eigen::MatrixXd d2 = oracle::dense(boundary2(k));
    Eigen::MatrixXd d1t = oracle::dense(boundary1(k)).transpose();
    Eigen::MatrixXd p = d2 * d2.completeOrthogonalDecomposition().pseudoInverse();
    EXPECT_LE((p * d1t).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(BoundarySolve, InnerToleranceFollowsFormula) {
  auto k = four_vertex_disk();
  Vector d{1, 0, 0, 0, 0, 0};
  auto r = solve_boundary(k, d, 0.1, OperatorRoute::laplacian);
  Eigen::MatrixXd l = oracle::dense(laplacian1(k));
  auto sl = oracle::singular_values(l);
  auto sd = oracle::singular_values(oracle::dense(boundary2(k)));
  double smin = 0;
  for (Eigen::Index i = 0; i < sl.size(); ++i) {
    if (sl[i] > 1e-9 * sl[0]) smin = sl[i];
  }
  EXPECT_NEAR(r.inner_eps, 0.1 * std::sqrt(smin) / (sd[0] * sd[0] * 1.0), 1e-9);
}

TEST(BoundarySolve, Errors) {
  auto k = four_vertex_disk();
  EXPECT_THROW(solve_boundary(k, Vector(6, 1.0), 0.0, OperatorRoute::gram), std::invalid_argument);
  EXPECT_THROW(solve_boundary(k, Vector(5, 1.0), 0.1, OperatorRoute::gram), std::invalid_argument);
  OperatorSolveOptions tiny;
  tiny.dense_limit = 2;
  EXPECT_THROW(solve_boundary(k, Vector{1, 2, 0, 0, 0, 1}, 0.1, OperatorRoute::gram, tiny), SizeGuardError);
  tiny.sigma_min_lower_bound = 0.5;
  auto r = solve_boundary(k, Vector{1, 2, 0, 0, 0, 1}, 0.1, OperatorRoute::gram, tiny);
  EXPECT_FALSE(r.dense_spectrum);
  EXPECT_TRUE(r.converged);
}

TEST(BoundarySolve, ZeroDemand) {
  auto r = solve_boundary(four_vertex_disk(), Vector(6, 0.0), 0.1, OperatorRoute::laplacian);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(norm_inf(r.f), 0.0);
}
