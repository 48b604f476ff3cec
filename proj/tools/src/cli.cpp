#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <stdexcept>

#include "sle/b2_reduce.hpp"
#include "sle/complex2.hpp"
#include "sle/generators.hpp"
#include "sle/io.hpp"
#include "sle/json_io.hpp"
#include "sle/lap_solve.hpp"
#include "sle/least_squares.hpp"
#include "sle/maxflow_ipm.hpp"
#include "sle/pipeline.hpp"
#include "sle/spectral.hpp"

namespace sle::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::uint64_t seed = 1;
  double eps = 1e-3;
  double alpha = 1.0;
  std::size_t dense_limit = kDenseLimit;
};

struct GenArgs {
  std::string kind = "general";
  std::string out;
  std::size_t rows = 5;
  std::size_t cols = 8;
};

struct ReduceArgs {
  std::string matrix, rhs, out;
  std::string stage = "b2w";
  std::string policy = "consistent";
};

struct SolveArgs {
  std::string dir, matrix, rhs;
  std::string route = "direct";
  std::string out, report;
  bool eps_given = false;
};

struct VerifyArgs {
  std::string dir;
};

struct DemoArgs {
  std::string network = "single-tube";
  std::size_t steps = 500;
  std::string trace;
  double target_alpha = 0.99;
};

void write_json(const fs::path& p, const json& j) { write_text(p.string(), j.dump(1) + "\n"); }

json read_json(const fs::path& p) { return json::parse(read_text(p.string())); }

// ---- gen ----------------------------------------------------------------

int cmd_gen(const Common& c, const GenArgs& g, std::ostream& out) {
  Rng rng(c.seed);
  fs::path dir(g.out);
  fs::create_directories(dir);
  if (g.kind == "network") {
    write_text((dir / "net.json").string(), network_to_json(single_tube_network()));
    out << "wrote " << (dir / "net.json").string() << "\n";
    return ok;
  }
  SparseMatrix a;
  Vector b;
  if (g.kind == "general") {
    GeneralInstanceSpec s;
    s.m = g.rows;
    s.n = g.cols;
    GeneralSystem sys = random_general_system(rng, s);
    a = sys.a;
    b = sys.b;
  } else if (g.kind == "gz2") {
    GeneralSystem sys = random_gz2_system(rng, g.rows, g.cols, 16);
    a = sys.a;
    b = sys.b;
  } else if (g.kind == "da-planted" || g.kind == "da-infeasible") {
    DAInstanceSpec s;
    s.n = g.cols;
    s.d = g.rows;
    DAInstance inst = random_da_instance(rng, s, g.kind == "da-planted");
    a = inst.system.pattern_matrix();
    b = inst.b;
    write_text((dir / "da.json").string(), da_system_to_json(inst.system));
    if (!inst.planted.empty()) write_vector(dir / "x_planted.vec", inst.planted);
  } else {
    throw std::invalid_argument("gen: unknown kind '" + g.kind + "'");
  }
  write_matrix_market(dir / "A.mtx", a);
  write_vector(dir / "b.vec", b);
  out << "wrote " << a.rows() << "x" << a.cols() << " system to " << dir.string() << "\n";
  return ok;
}

// ---- reduce -------------------------------------------------------------

EpsilonPolicy parse_policy(const std::string& s) {
  if (s == "consistent") return EpsilonPolicy::consistent;
  if (s == "certified") return EpsilonPolicy::certified;
  throw std::invalid_argument("unknown policy '" + s + "'");
}

int cmd_reduce(const Common& c, const ReduceArgs& r, std::ostream& out) {
  GeneralSystem sys;
  sys.a = read_matrix_market(fs::path(r.matrix));
  sys.b = read_vector(fs::path(r.rhs));
  sys.tag = SystemClass::G;

  ChainOptions opts;
  opts.eps = c.eps;
  opts.alpha = c.alpha;
  opts.policy = parse_policy(r.policy);
  opts.target = parse_stage(r.stage);
  Chain chain = build_chain(sys, opts);

  fs::path dir(r.out);
  fs::create_directories(dir);
  std::vector<std::string> files;
  auto mtx = [&](const std::string& name, const SparseMatrix& m) {
    write_matrix_market(dir / name, m);
    files.push_back(name);
  };
  auto vec = [&](const std::string& name, std::span<const double> v) {
    write_vector(dir / name, v);
    files.push_back(name);
  };
  auto text = [&](const std::string& name, const std::string& t) {
    write_text((dir / name).string(), t);
    files.push_back(name);
  };

  mtx("input_A.mtx", sys.a);
  vec("input_b.vec", sys.b);
  mtx("A_gz.mtx", chain.gz.a);
  vec("b_gz.vec", chain.gz.b);
  json problem;
  if (opts.target == Stage::gz) {
    problem = {{"matrix", "A_gz.mtx"}, {"rhs", "b_gz.vec"}};
  } else {
    mtx("A_gz2.mtx", chain.gz2.a);
    vec("b_gz2.vec", chain.gz2.b);
    problem = {{"matrix", "A_gz2.mtx"}, {"rhs", "b_gz2.vec"}};
  }
  if (opts.target == Stage::da || opts.target == Stage::b2 || opts.target == Stage::b2w) {
    text("da.json", da_system_to_json(chain.da.system));
    mtx("B.mtx", chain.da.system.as_matrix());
    vec("c.vec", chain.da.rhs);
    problem = {{"matrix", "B.mtx"}, {"rhs", "c.vec"}};
  }
  if (opts.target == Stage::b2 || opts.target == Stage::b2w) {
    const bool zero = chain.maps.front().kind == BackMap::Kind::zero;
    mtx("d2.mtx", chain.b2.d2);
    vec("W.vec", chain.b2.weights);
    vec("gamma.vec", chain.b2.gamma);
    text("trace.json", sidecar_to_json(chain.b2, zero));
    text("complex.json", complex_to_json(chain.b2.complex));
    problem = {{"matrix", "d2.mtx"}, {"rhs", "gamma.vec"}, {"weights", "W.vec"}};
  }

  json maps = json::array();
  for (const BackMap& m : chain.maps) maps.push_back(json::parse(back_map_to_json(m)));
  json manifest = {
      {"stage", to_string(opts.target)},
      {"policy", r.policy},
      {"seed", c.seed},
      {"eps", c.eps},
      {"alpha", chain.alpha},
      {"eps_da", chain.eps_da},
      {"eps_target", chain.target_eps()},
      {"input", {{"matrix", "input_A.mtx"}, {"rhs", "input_b.vec"}}},
      {"problem", problem},
      {"back_maps", maps},
      {"files", files},
  };
  write_json(dir / "manifest.json", manifest);
  out << "stage " << to_string(opts.target) << ": " << files.size() + 1 << " files in " << dir.string()
      << ", target eps " << chain.target_eps() << "\n";
  return ok;
}

// ---- solve --------------------------------------------------------------

struct LoadedProblem {
  SparseMatrix a;
  Vector rhs;
  Vector weights;  // empty when unweighted
};

LoadedProblem load_problem(const fs::path& dir, const json& problem) {
  LoadedProblem p;
  p.a = read_matrix_market(dir / problem.at("matrix").get<std::string>());
  p.rhs = read_vector(dir / problem.at("rhs").get<std::string>());
  if (problem.contains("weights")) p.weights = read_vector(dir / problem.at("weights").get<std::string>());
  return p;
}

std::vector<BackMap> load_maps(const json& manifest) {
  std::vector<BackMap> maps;
  for (const json& m : manifest.at("back_maps")) maps.push_back(back_map_from_json(m.dump()));
  return maps;
}

int cmd_solve_plain(const Common& c, const SolveArgs& s, std::ostream& out) {
  if (s.route != "direct") throw std::invalid_argument("solve: a bare system only supports --route direct");
  SparseMatrix a = read_matrix_market(fs::path(s.matrix));
  Vector b = read_vector(fs::path(s.rhs));
  LeastSquaresResult r = least_squares(a, b, c.eps, 50000);
  json report = {{"route", "direct"},
                 {"eps", c.eps},
                 {"iterations", r.iterations},
                 {"residual", r.residual_norm},
                 {"projected_residual", r.projected_residual_norm},
                 {"projected_rhs", r.projected_rhs_norm},
                 {"certified", r.converged}};
  if (!s.out.empty()) write_vector(fs::path(s.out), r.x);
  if (!s.report.empty()) write_json(s.report, report);
  out << report.dump(1) << "\n";
  return r.converged ? ok : certificate_failed;
}

int cmd_solve(const Common& c, const SolveArgs& s, std::ostream& out) {
  if (s.dir.empty()) return cmd_solve_plain(c, s, out);
  fs::path dir(s.dir);
  const json manifest = read_json(dir / "manifest.json");
  GeneralSystem original;
  original.a = read_matrix_market(dir / manifest.at("input").at("matrix").get<std::string>());
  original.b = read_vector(dir / manifest.at("input").at("rhs").get<std::string>());
  const std::vector<BackMap> maps = load_maps(manifest);
  const double user_eps = s.eps_given ? c.eps : manifest.at("eps").get<double>();
  double target_eps = manifest.at("eps_target").get<double>();
  if (s.eps_given) target_eps *= c.eps / manifest.at("eps").get<double>();

  LoadedProblem p = load_problem(dir, manifest.at("problem"));
  json report = {{"route", s.route}, {"stage", manifest.at("stage")}, {"eps", user_eps}};
  ChainSolve result;
  if (s.route == "direct") {
    SparseMatrix a = p.a;
    Vector rhs = p.rhs;
    if (!p.weights.empty()) {
      Vector root(p.weights.size());
      for (std::size_t e = 0; e < root.size(); ++e) root[e] = std::sqrt(p.weights[e]);
      a = a.scaled(root, {});
      for (std::size_t e = 0; e < rhs.size(); ++e) rhs[e] *= root[e];
    }
    result = solve_mapped(a, rhs, maps, original, target_eps, user_eps);
    ProjectionResidual pr = projection_residual(a, result.target_x, rhs);
    report["target"] = {{"eps", result.eps_used},
                        {"projected_residual", pr.residual},
                        {"projected_rhs", pr.rhs},
                        {"relative", pr.relative()}};
  } else {
    const OperatorRoute route = s.route == "laplacian" ? OperatorRoute::laplacian
                                : s.route == "gram"    ? OperatorRoute::gram
                                                       : throw std::invalid_argument("unknown route '" + s.route + "'");
    if (!fs::exists(dir / "complex.json")) {
      throw std::invalid_argument("solve: operator routes need a b2 or b2w reduction");
    }
    // The operator routes solve the unweighted boundary problem. Row weights do
    // not change the solution set of a consistent system; for an inconsistent
    // one the check against the original system below decides.
    bool weighted = false;
    for (double w : p.weights) weighted = weighted || w != 1.0;
    report["weights_ignored"] = weighted;
    Complex2 k = complex_from_json(read_text((dir / "complex.json").string()));
    OperatorSolveOptions oo;
    oo.dense_limit = c.dense_limit;
    double tol = target_eps;
    for (std::size_t attempt = 1; attempt <= 5; ++attempt) {
      OperatorSolveResult r = solve_boundary(k, p.rhs, tol, route, oo);
      result.iterations += r.iterations;
      result.attempts = attempt;
      result.eps_used = tol;
      result.x = apply_chain(maps, r.f);
      result.relative_error = projection_residual(original.a, result.x, original.b).relative();
      result.certified = r.converged && result.relative_error <= user_eps;
      report["target"] = {{"eps", tol},
                          {"inner_eps", r.inner_eps},
                          {"certified_error", r.certified_error},
                          {"degenerate", r.degenerate},
                          {"note", r.note}};
      if (result.certified || r.degenerate) break;
      tol /= 10.0;
    }
  }
  report["original"] = {{"relative_error", result.relative_error}, {"eps", user_eps}};
  report["attempts"] = result.attempts;
  report["iterations"] = result.iterations;
  report["certified"] = result.certified;
  if (!s.out.empty()) write_vector(fs::path(s.out), result.x);
  if (!s.report.empty()) write_json(s.report, report);
  out << report.dump(1) << "\n";
  return result.certified ? ok : certificate_failed;
}

// ---- verify -------------------------------------------------------------

int cmd_verify(const Common& c, const VerifyArgs& v, std::ostream& out) {
  fs::path dir(v.dir);
  json report = json::object();
  bool pass = true;
  auto check = [&](const std::string& name, bool good, json detail = nullptr) {
    report[name] = {{"ok", good}};
    if (!detail.is_null()) report[name]["detail"] = detail;
    pass = pass && good;
  };

  if (fs::exists(dir / "A_gz.mtx")) {
    SparseMatrix a = read_matrix_market(dir / "A_gz.mtx");
    check("gz_class", has_zero_row_sums(a));
  }
  if (fs::exists(dir / "A_gz2.mtx")) {
    SparseMatrix a = read_matrix_market(dir / "A_gz2.mtx");
    check("gz2_class", has_zero_row_sums(a) && has_pow2_positive_sums(a));
  }
  if (fs::exists(dir / "complex.json")) {
    Complex2 k = complex_from_json(read_text((dir / "complex.json").string()));
    ValidationReport vr = validate(k);
    check("complex", vr.ok, vr.ok ? json(nullptr) : json(vr.message));
    SparseMatrix d2 = read_matrix_market(dir / "d2.mtx");
    SparseMatrix d1 = boundary1(k);
    const bool shape = d2.rows() == d1.cols();
    check("chain_identity", shape && product_is_zero(d1, d2));
    check("d2_matches_complex", d2 == boundary2(k));
    if (fs::exists(dir / "da.json")) {
      WeightedDASystem da = da_system_from_json(read_text((dir / "da.json").string()));
      BoundaryProblem p = reduce_da_to_b2(da);
      p.d2 = d2;
      SizeReport sr = size_report(p);
      check("size_bounds", sr.ok(), {{"t", sr.t}, {"m", sr.m}, {"nnz_a", sr.nnz_a}, {"exact_t", sr.exact_t}});
      SpectralCertificate sc = spectral_certificate(p, da.pattern_matrix(), c.dense_limit);
      check("spectral", sc.ok(),
            {{"lambda_max", sc.lambda_max},
             {"lambda_min", sc.lambda_min},
             {"lambda_min_bound", sc.lambda_min_bound},
             {"kappa_d2", sc.kappa_d2},
             {"kappa_bound", sc.kappa_bound},
             {"nullity_d2", sc.nullity_d2},
             {"nullity_a", sc.nullity_a}});
    }
  }
  if (report.empty()) throw std::invalid_argument("verify: no artifacts found in " + dir.string());
  report["ok"] = pass;
  out << report.dump(1) << "\n";
  return pass ? ok : certificate_failed;
}

// ---- maxflow-demo -------------------------------------------------------

int cmd_demo(const DemoArgs& d, std::ostream& out) {
  FlowNetwork2 net = d.network == "single-tube" ? single_tube_network()
                                                : network_from_json(read_text(d.network));
  IpmResult r = run_ipm(net, d.steps, {}, d.target_alpha);
  Vector demand = net.gamma;
  for (double& g : demand) g *= net.f_star;
  const double scale = norm2(demand);
  bool feasible = true;
  bool consistent = true;
  for (const StepRecord& s : r.log) {
    if (!std::isfinite(s.potential)) feasible = false;
    if (s.residual > 1e-6 * scale) consistent = false;
  }
  if (!d.trace.empty()) {
    std::ofstream csv(d.trace);
    if (!csv) throw std::runtime_error("cannot write " + d.trace);
    csv.precision(17);
    csv << "step,alpha,V,residual\n";
    for (const StepRecord& s : r.log) {
      csv << s.step << "," << s.alpha << "," << s.potential << "," << s.residual << "\n";
    }
  }
  json summary = {{"steps", r.log.size()},
                  {"alpha_final", r.alpha_final},
                  {"f_star", net.f_star},
                  {"strictly_feasible", feasible},
                  {"demand_consistent", consistent}};
  out << summary.dump(1) << "\n";
  return feasible && consistent && r.alpha_final >= d.target_alpha ? ok : certificate_failed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse linear system reductions to 2-complex boundary problems", "sle"};
  app.require_subcommand(1);
  Common c;
  app.add_option("--seed", c.seed, "Seed for every random draw")->capture_default_str();
  auto* eps_opt = app.add_option("--eps", c.eps, "User accuracy")->capture_default_str();
  app.add_option("--alpha", c.alpha, "Weight of auxiliary rows / weighted B2 step")->capture_default_str();
  app.add_option("--dense-limit", c.dense_limit, "Largest dimension for dense spectra")->capture_default_str();

  GenArgs g;
  auto* gen = app.add_subcommand("gen", "Write a random instance");
  gen->add_option("--kind", g.kind, "general | gz2 | da-planted | da-infeasible | network")->capture_default_str();
  gen->add_option("--rows", g.rows)->capture_default_str();
  gen->add_option("--cols", g.cols)->capture_default_str();
  gen->add_option("--out", g.out)->required();

  ReduceArgs r;
  auto* reduce = app.add_subcommand("reduce", "Reduce A x = b down the chain");
  reduce->add_option("--matrix", r.matrix)->required()->check(CLI::ExistingFile);
  reduce->add_option("--rhs", r.rhs)->required()->check(CLI::ExistingFile);
  reduce->add_option("--stage", r.stage, "gz | gz2 | da | b2 | b2w")->capture_default_str();
  reduce->add_option("--policy", r.policy, "consistent | certified")->capture_default_str();
  reduce->add_option("--out", r.out)->required();

  SolveArgs s;
  auto* solve = app.add_subcommand("solve", "Solve a reduced problem and map the solution back");
  solve->add_option("--dir", s.dir, "Output directory of reduce")->check(CLI::ExistingDirectory);
  solve->add_option("--matrix", s.matrix)->check(CLI::ExistingFile);
  solve->add_option("--rhs", s.rhs)->check(CLI::ExistingFile);
  solve->add_option("--route", s.route, "direct | laplacian | gram")->capture_default_str();
  solve->add_option("--out", s.out, "Solution vector file");
  solve->add_option("--report", s.report, "JSON report file");

  VerifyArgs v;
  auto* verify = app.add_subcommand("verify", "Check reduction artifacts");
  verify->add_option("--dir", v.dir)->required()->check(CLI::ExistingDirectory);

  DemoArgs d;
  auto* demo = app.add_subcommand("maxflow-demo", "Interior point max flow on a 2-complex network");
  demo->add_option("--network", d.network, "net.json or single-tube")->capture_default_str();
  demo->add_option("--steps", d.steps)->capture_default_str();
  demo->add_option("--trace", d.trace, "CSV trace file");
  demo->add_option("--target-alpha", d.target_alpha)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : error;
  }

  try {
    if (gen->parsed()) return cmd_gen(c, g, out);
    if (reduce->parsed()) return cmd_reduce(c, r, out);
    if (solve->parsed()) {
      s.eps_given = eps_opt->count() > 0;
      if (s.dir.empty() && (s.matrix.empty() || s.rhs.empty())) {
        throw std::invalid_argument("solve: give --dir or both --matrix and --rhs");
      }
      return cmd_solve(c, s, out);
    }
    if (verify->parsed()) return cmd_verify(c, v, out);
    if (demo->parsed()) return cmd_demo(d, out);
  } catch (const SizeGuardError& e) {
    err << "size guard: " << e.what() << "\n";
    return error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return error;
  }
  return error;
}

}  // namespace sle::cli
