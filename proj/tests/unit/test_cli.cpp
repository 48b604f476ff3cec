#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cli.hpp"
#include "sle/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = sle::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / (std::string("sle_cli_") + info->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  // x1 - x2 = 1, 2 x2 - x3 = 3, x1 + x3 = 2 over three variables
  void write_toy() {
    std::ofstream a(root_ / "A.mtx");
    a << "%%MatrixMarket matrix coordinate integer general\n3 3 6\n"
         "1 1 1\n1 2 -1\n2 2 2\n2 3 -1\n3 1 1\n3 3 1\n";
    std::ofstream b(root_ / "b.vec");
    b << "1\n3\n2\n";
  }

  fs::path path(const std::string& name) const { return root_ / name; }

  fs::path root_;
};

}  // namespace

TEST_F(Cli, ReduceWritesEveryStageArtifact) {
  write_toy();
  auto r = run({"reduce", "--matrix", path("A.mtx").string(), "--rhs", path("b.vec").string(), "--stage",
                "b2w", "--out", path("red").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"manifest.json", "input_A.mtx", "input_b.vec", "A_gz.mtx", "b_gz.vec", "A_gz2.mtx",
                        "b_gz2.vec", "da.json", "B.mtx", "c.vec", "d2.mtx", "W.vec", "gamma.vec",
                        "trace.json", "complex.json"}) {
    EXPECT_TRUE(fs::exists(path("red") / f)) << f;
  }
  auto manifest = json::parse(slurp(path("red") / "manifest.json"));
  EXPECT_EQ(manifest.at("stage"), "b2w");
  EXPECT_EQ(manifest.at("problem").at("weights"), "W.vec");
  EXPECT_EQ(manifest.at("back_maps").size(), 4u);
}

TEST_F(Cli, ReduceIsBitIdenticalOnRerun) {
  write_toy();
  for (const char* out : {"one", "two"}) {
    auto r = run({"--seed", "9", "reduce", "--matrix", path("A.mtx").string(), "--rhs", path("b.vec").string(),
                  "--stage", "b2w", "--out", path(out).string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(path("one"))) {
    const auto twin = path("two") / entry.path().filename();
    ASSERT_TRUE(fs::exists(twin));
    EXPECT_EQ(slurp(entry.path()), slurp(twin)) << entry.path().filename();
    ++compared;
  }
  EXPECT_GE(compared, 15u);
}

TEST_F(Cli, GeneratedPlantedInstanceReplaysFromManifest) {
  auto g = run({"--seed", "5", "gen", "--kind", "da-planted", "--rows", "6", "--cols", "4", "--out",
                path("inst").string()});
  ASSERT_EQ(g.code, 0) << g.err;
  auto r = run({"--seed", "5", "reduce", "--matrix", (path("inst") / "A.mtx").string(), "--rhs",
                (path("inst") / "b.vec").string(), "--stage", "b2", "--out", path("red").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto manifest = json::parse(slurp(path("red") / "manifest.json"));
  const auto seed = manifest.at("seed").get<std::uint64_t>();
  auto again = run({"--seed", std::to_string(seed), "gen", "--kind", "da-planted", "--rows", "6", "--cols", "4",
                    "--out", path("replay").string()});
  ASSERT_EQ(again.code, 0);
  for (const char* f : {"A.mtx", "b.vec", "x_planted.vec"}) {
    EXPECT_EQ(slurp(path("inst") / f), slurp(path("replay") / f)) << f;
  }
  auto s = run({"solve", "--dir", path("red").string(), "--out", path("x.vec").string()});
  EXPECT_EQ(s.code, 0) << s.out;
  const auto a = sle::read_matrix_market(path("inst") / "A.mtx");
  const auto b = sle::read_vector(path("inst") / "b.vec");
  const auto x = sle::read_vector(path("x.vec"));
  EXPECT_LE(sle::norm2(sle::subtract(sle::matvec(a, x), b)), 1e-3 * sle::norm2(b));
}

TEST_F(Cli, ThreeSolveRoutesCertify) {
  // planted instance: consistent, so every route can certify
  ASSERT_EQ(run({"--seed", "3", "gen", "--kind", "da-planted", "--rows", "6", "--cols", "4", "--out",
                 path("inst").string()})
                .code,
            0);
  ASSERT_EQ(run({"reduce", "--matrix", (path("inst") / "A.mtx").string(), "--rhs", (path("inst") / "b.vec").string(),
                 "--stage", "b2", "--out", path("red").string()})
                .code,
            0);
  for (const char* route : {"direct", "laplacian", "gram"}) {
    const auto report = path(std::string(route) + ".json");
    auto s = run({"solve", "--dir", path("red").string(), "--route", route, "--report", report.string()});
    EXPECT_EQ(s.code, 0) << route << "\n" << s.out << s.err;
    auto j = json::parse(slurp(report));
    EXPECT_TRUE(j.at("certified").get<bool>());
    EXPECT_LE(j.at("original").at("relative_error").get<double>(), j.at("eps").get<double>());
  }
}

TEST_F(Cli, OperatorRoutesOnWeightedConsistentProblem) {
  write_toy();
  ASSERT_EQ(run({"reduce", "--matrix", path("A.mtx").string(), "--rhs", path("b.vec").string(), "--out",
                 path("red").string()})
                .code,
            0);
  auto s = run({"solve", "--dir", path("red").string(), "--route", "gram", "--report", path("r.json").string()});
  EXPECT_EQ(s.code, 0) << s.out << s.err;
  auto j = json::parse(slurp(path("r.json")));
  EXPECT_TRUE(j.at("weights_ignored").get<bool>());
  EXPECT_TRUE(j.at("certified").get<bool>());
}

TEST_F(Cli, OperatorRoutesNeedAComplex) {
  write_toy();
  ASSERT_EQ(run({"reduce", "--matrix", path("A.mtx").string(), "--rhs", path("b.vec").string(), "--stage", "da",
                 "--out", path("red").string()})
                .code,
            0);
  EXPECT_EQ(run({"solve", "--dir", path("red").string(), "--route", "laplacian"}).code, sle::cli::error);
}

TEST_F(Cli, VerifyPassesOnFreshArtifacts) {
  write_toy();
  ASSERT_EQ(run({"reduce", "--matrix", path("A.mtx").string(), "--rhs", path("b.vec").string(), "--stage", "b2",
                 "--out", path("red").string()})
                .code,
            0);
  auto v = run({"verify", "--dir", path("red").string()});
  EXPECT_EQ(v.code, 0) << v.out;
  auto j = json::parse(v.out);
  EXPECT_TRUE(j.at("ok").get<bool>());
  for (const char* k : {"gz_class", "gz2_class", "complex", "chain_identity", "size_bounds", "spectral"}) {
    EXPECT_TRUE(j.at(k).at("ok").get<bool>()) << k;
  }
}

TEST_F(Cli, VerifyCatchesCorruptedBoundary) {
  write_toy();
  ASSERT_EQ(run({"reduce", "--matrix", path("A.mtx").string(), "--rhs", path("b.vec").string(), "--stage", "b2",
                 "--out", path("red").string()})
                .code,
            0);
  auto d2 = sle::read_matrix_market(path("red") / "d2.mtx");
  std::vector<sle::Triplet> t;
  for (std::size_t i = 0; i < d2.rows(); ++i) {
    for (std::size_t k = d2.row_ptr()[i]; k < d2.row_ptr()[i + 1]; ++k) {
      t.push_back({i, d2.col_idx()[k], d2.values()[k]});
    }
  }
  t[0].value = -t[0].value;
  sle::write_matrix_market(path("red") / "d2.mtx", sle::SparseMatrix::from_triplets(d2.rows(), d2.cols(), t));
  auto v = run({"verify", "--dir", path("red").string()});
  EXPECT_EQ(v.code, sle::cli::certificate_failed);
  auto j = json::parse(v.out);
  EXPECT_FALSE(j.at("chain_identity").at("ok").get<bool>());
  EXPECT_FALSE(j.at("ok").get<bool>());
}

TEST_F(Cli, DenseLimitGuard) {
  write_toy();
  ASSERT_EQ(run({"reduce", "--matrix", path("A.mtx").string(), "--rhs", path("b.vec").string(), "--stage", "b2",
                 "--out", path("red").string()})
                .code,
            0);
  auto v = run({"--dense-limit", "5", "verify", "--dir", path("red").string()});
  EXPECT_EQ(v.code, sle::cli::error);
  EXPECT_NE(v.err.find("size guard"), std::string::npos) << v.err;
}

TEST_F(Cli, MaxflowDemoWritesTrace) {
  auto r = run({"maxflow-demo", "--steps", "500", "--target-alpha", "0.99", "--trace", path("t.csv").string()});
  EXPECT_EQ(r.code, 0) << r.out;
  std::ifstream csv(path("t.csv"));
  std::string header, line;
  std::getline(csv, header);
  EXPECT_EQ(header, "step,alpha,V,residual");
  std::size_t rows = 0;
  double last_alpha = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    std::getline(ss, cell, ',');
    last_alpha = std::stod(cell);
  }
  EXPECT_GT(rows, 0u);
  EXPECT_GE(last_alpha, 0.99);
  auto j = json::parse(r.out);
  EXPECT_TRUE(j.at("strictly_feasible").get<bool>());
  EXPECT_TRUE(j.at("demand_consistent").get<bool>());
}

TEST_F(Cli, BadInvocationsExitWithError) {
  EXPECT_EQ(run({"reduce", "--matrix", path("missing.mtx").string()}).code, sle::cli::error);
  EXPECT_EQ(run({"nonsense"}).code, sle::cli::error);
  write_toy();
  EXPECT_EQ(run({"reduce", "--matrix", path("A.mtx").string(), "--rhs", path("b.vec").string(), "--stage", "b9",
                 "--out", path("red").string()})
                .code,
            sle::cli::error);
}
