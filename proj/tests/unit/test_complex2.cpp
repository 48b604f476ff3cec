#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sle/complex2.hpp"

using namespace sle;

namespace {

Eigen::MatrixXd golden_disk_boundary() {
  Eigen::MatrixXd g(6, 3);
  g << -1, 0, 0,
        0, -1, 0,
        0, 0, 1,
        1, 0, -1,
       -1, 1, 0,
        0, -1, 1;
  return g;
}

Complex2 single_triangle() {
  Complex2 k;
  k.add_vertices(3);
  k.ensure_edge(0, 1, EdgeKind::free);
  k.ensure_edge(1, 2, EdgeKind::free);
  k.ensure_edge(0, 2, EdgeKind::free);
  k.add_triangle(0, 1, 2);
  return k;
}

// boundary of a tetrahedron: a 2-sphere, one 2-cycle
Complex2 hollow_tetrahedron() {
  Complex2 k;
  k.add_vertices(4);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a + 1; b < 4; ++b) k.ensure_edge(a, b, EdgeKind::interior);
  }
  k.add_triangle(0, 1, 2);
  k.add_triangle(0, 3, 1);
  k.add_triangle(1, 3, 2);
  k.add_triangle(0, 2, 3);
  return k;
}

long betti1(const Complex2& k) {
  const long m = static_cast<long>(k.n_edges());
  const long rank_d1 = oracle::rank(oracle::dense(boundary1(k)));
  const long rank_d2 = k.n_triangles() ? oracle::rank(oracle::dense(boundary2(k))) : 0;
  return m - rank_d1 - rank_d2;
}

long kernel_dim(const Eigen::MatrixXd& a) { return static_cast<long>(a.cols()) - oracle::rank(a); }

}  // namespace

TEST(Boundary2, DiskMatchesGoldenMatrix) {
  auto k = four_vertex_disk();
  EXPECT_TRUE(oracle::dense(boundary2(k)) == golden_disk_boundary());
}

TEST(Boundary2, SingleTriangleColumn) {
  auto d2 = boundary2(single_triangle());
  ASSERT_EQ(d2.rows(), 3u);
  ASSERT_EQ(d2.cols(), 1u);
  EXPECT_EQ(d2.nnz(), 3u);
  for (double v : d2.values()) EXPECT_EQ(std::abs(v), 1.0);
}

TEST(Boundary2, EveryColumnHasThreeEntries) {
  auto p = triangulate_punctured_sphere(7);
  auto d2 = boundary2(p.complex);
  EXPECT_EQ(d2.nnz(), 3 * d2.cols());
  auto t = d2.transpose();
  for (std::size_t c = 0; c < t.rows(); ++c) EXPECT_EQ(t.row_ptr()[c + 1] - t.row_ptr()[c], 3u);
}

TEST(Boundary2, MissingEdgeThrows) {
  Complex2 k;
  k.add_vertices(3);
  k.ensure_edge(0, 1, EdgeKind::free);
  EXPECT_ANY_THROW({
    k.add_triangle(0, 1, 2);
    boundary2(k);
  });
}

TEST(Boundary1, IncidenceConvention) {
  Complex2 k;
  k.add_vertices(2);
  k.add_edge(1, 0, EdgeKind::free);
  auto d1 = boundary1(k);
  EXPECT_EQ(d1.at(1, 0), -1.0);
  EXPECT_EQ(d1.at(0, 0), 1.0);
}

TEST(Boundary1, ChainIdentityOnDisk) {
  auto k = four_vertex_disk();
  EXPECT_TRUE(product_is_zero(boundary1(k), boundary2(k)));
}

TEST(Boundary1, ChainIdentityOnPatches) {
  for (std::size_t b : {1u, 2u, 5u, 40u}) {
    auto p = triangulate_punctured_sphere(b);
    EXPECT_TRUE(product_is_zero(boundary1(p.complex), boundary2(p.complex)));
  }
  for (auto m : {TubeMatch::opposite, TubeMatch::identical}) {
    auto p = triangulate_tube(m);
    EXPECT_TRUE(product_is_zero(boundary1(p.complex), boundary2(p.complex)));
  }
}

TEST(Laplacian1, GraphCaseWithoutTriangles) {
  Complex2 k;
  k.add_vertices(3);
  k.ensure_edge(0, 1, EdgeKind::free);
  k.ensure_edge(1, 2, EdgeKind::free);
  Eigen::MatrixXd d1 = oracle::dense(boundary1(k));
  EXPECT_TRUE(oracle::dense(laplacian1(k)) == d1.transpose() * d1);
}

TEST(Laplacian1, DiskIsSymmetricPositiveSemidefinite) {
  Eigen::MatrixXd l = oracle::dense(laplacian1(four_vertex_disk()));
  EXPECT_TRUE(l == l.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
}

TEST(Laplacian1, KernelDimensionIsFirstBettiNumber) {
  Complex2 cycle;
  cycle.add_vertices(3);
  cycle.ensure_edge(0, 1, EdgeKind::free);
  cycle.ensure_edge(1, 2, EdgeKind::free);
  cycle.ensure_edge(0, 2, EdgeKind::free);
  std::vector<std::pair<Complex2, long>> cases{
      {four_vertex_disk(), 0}, {cycle, 1}, {hollow_tetrahedron(), 0},
      {triangulate_punctured_sphere(3).complex, 2}};
  for (const auto& [k, expected] : cases) {
    const long ker_l1 = kernel_dim(oracle::dense(laplacian1(k)));
    EXPECT_EQ(ker_l1, betti1(k));
    EXPECT_EQ(ker_l1, expected);
  }
}

TEST(Validate, AcceptsConstructedPatches) {
  EXPECT_TRUE(validate(four_vertex_disk()).ok);
  EXPECT_TRUE(validate(triangulate_punctured_sphere(4).complex).ok);
  EXPECT_TRUE(validate(triangulate_tube(TubeMatch::identical).complex).ok);
}

TEST(Validate, FlippedTriangleBreaksInteriorSigns) {
  auto k = four_vertex_disk();
  std::swap(k.triangles[1].v[0], k.triangles[1].v[1]);
  auto r = validate(k);
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.message.empty());
}

TEST(Validate, MissingCentralTriangleIsStructuralError) {
  auto k = four_vertex_disk();
  k.central.clear();
  EXPECT_FALSE(validate(k).ok);
}

TEST(Validate, DanglingEdgeEndpointRejected) {
  auto k = four_vertex_disk();
  k.edges[0].v = 17;
  k.reindex();
  EXPECT_FALSE(validate(k).ok);
}

TEST(PuncturedSphere, CountsForSmallCases) {
  auto one = triangulate_punctured_sphere(1);
  EXPECT_EQ(one.complex.n_triangles(), 1u);
  EXPECT_EQ(one.complex.n_edges(), 3u);
  auto two = triangulate_punctured_sphere(2);
  EXPECT_EQ(two.complex.n_triangles(), 6u);
  EXPECT_EQ(two.complex.n_edges(), 12u);
  auto five = triangulate_punctured_sphere(5);
  EXPECT_EQ(five.complex.n_triangles(), 21u);
  EXPECT_EQ(five.complex.n_edges(), 39u);
}

TEST(PuncturedSphere, CountsHoldUpToFiveHundred) {
  for (std::size_t b = 1; b <= 500; ++b) {
    auto p = triangulate_punctured_sphere(b);
    ASSERT_EQ(p.complex.n_triangles(), 5 * b - 4) << b;
    ASSERT_EQ(p.complex.n_edges(), 9 * b - 6) << b;
    ASSERT_EQ(p.complex.n_vertices, 3 * b) << b;
    ASSERT_EQ(p.holes.size(), b) << b;
  }
}

TEST(PuncturedSphere, HolesAreThreeEdgeBoundaryCycles) {
  auto p = triangulate_punctured_sphere(6);
  auto d2 = boundary2(p.complex);
  Vector ones(d2.cols(), 1.0);
  auto boundary = matvec(d2, ones);
  std::size_t on_boundary = 0;
  for (double v : boundary) on_boundary += v != 0.0 ? 1 : 0;
  EXPECT_EQ(on_boundary, 3 * p.holes.size());
  for (const auto& h : p.holes) {
    for (int s = 0; s < 3; ++s) {
      auto e = p.complex.find_edge(h[s], h[(s + 1) % 3]);
      ASSERT_TRUE(e.has_value());
      EXPECT_NE(boundary[*e], 0.0);
    }
  }
}

TEST(PuncturedSphere, ZeroHolesRejected) { EXPECT_ANY_THROW(triangulate_punctured_sphere(0)); }

TEST(Tube, CountsAndInteriorSigns) {
  for (auto m : {TubeMatch::opposite, TubeMatch::identical}) {
    auto p = triangulate_tube(m);
    EXPECT_EQ(p.complex.n_triangles(), 6u);
    EXPECT_EQ(p.complex.n_edges(), 12u);
    auto d2 = boundary2(p.complex);
    std::size_t interior = 0;
    for (std::size_t e = 0; e < p.complex.n_edges(); ++e) {
      if (p.complex.edges[e].kind != EdgeKind::interior) continue;
      ++interior;
      double plus = 0, minus = 0;
      for (std::size_t k = d2.row_ptr()[e]; k < d2.row_ptr()[e + 1]; ++k) {
        (d2.values()[k] > 0 ? plus : minus) += 1;
      }
      EXPECT_EQ(plus, 1);
      EXPECT_EQ(minus, 1);
    }
    EXPECT_EQ(interior, 6u);
  }
}

TEST(Tube, MatchDecidesLoopTraversal) {
  // flow 1 on every triangle: the far boundary is traversed along the loop
  // in one case and against it in the other
  auto signed_loop = [](TubeMatch m) {
    Complex2 k;
    k.add_vertices(6);
    std::array<std::size_t, 3> hole{0, 1, 2}, loop{3, 4, 5};
    for (int s = 0; s < 3; ++s) k.add_edge(loop[s], loop[(s + 1) % 3], EdgeKind::loop, kNoGroup, 0, s + 1);
    k.loops.push_back({0, 1, 2});
    append_tube(k, hole, loop, m, 0, EdgeKind::free, EdgeKind::loop);
    auto flow = matvec(boundary2(k), Vector(k.n_triangles(), 1.0));
    return flow[0] + flow[1] + flow[2];
  };
  EXPECT_EQ(signed_loop(TubeMatch::opposite), 3.0);
  EXPECT_EQ(signed_loop(TubeMatch::identical), -3.0);
}
