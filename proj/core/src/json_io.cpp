#include "sle/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sle {

using nlohmann::json;

namespace {

const char* kind_name(DAKind k) { return k == DAKind::difference ? "difference" : "average"; }

DAKind kind_from(const std::string& s) {
  if (s == "difference") return DAKind::difference;
  if (s == "average") return DAKind::average;
  throw std::invalid_argument("unknown DA row kind '" + s + "'");
}

EdgeKind edge_kind_from(const std::string& s) {
  if (s == "loop") return EdgeKind::loop;
  if (s == "interior") return EdgeKind::interior;
  if (s == "free") return EdgeKind::free;
  throw std::invalid_argument("unknown edge kind '" + s + "'");
}

const char* map_kind_name(BackMap::Kind k) {
  switch (k) {
    case BackMap::Kind::select: return "select";
    case BackMap::Kind::shift: return "shift";
    case BackMap::Kind::zero: return "zero";
  }
  return "?";
}

json complex_json(const Complex2& k) {
  json j;
  j["n_vertices"] = k.n_vertices;
  json edges = json::array();
  for (const auto& e : k.edges) {
    json je{{"u", e.u}, {"v", e.v}, {"kind", to_string(e.kind)}};
    if (e.kind == EdgeKind::loop) {
      je["q"] = e.q;
      je["r"] = e.r;
    } else {
      je["group"] = e.group == kNoGroup ? json(nullptr) : json(e.group);
    }
    edges.push_back(je);
  }
  j["edges"] = edges;
  json tris = json::array();
  for (std::size_t t = 0; t < k.n_triangles(); ++t) {
    const auto& v = k.triangles[t].v;
    json jt{{"v0", v[0]}, {"v1", v[1]}, {"v2", v[2]}};
    if (k.has_groups() && k.group_of_triangle[t] != kNoGroup) jt["group"] = k.group_of_triangle[t];
    tris.push_back(jt);
  }
  j["triangles"] = tris;
  j["central"] = k.central;
  j["loops"] = k.loops;
  return j;
}

Complex2 complex_from(const json& j) {
  Complex2 k;
  k.n_vertices = j.at("n_vertices").get<std::size_t>();
  for (const auto& je : j.at("edges")) {
    EdgeRecord e;
    e.u = je.at("u").get<std::size_t>();
    e.v = je.at("v").get<std::size_t>();
    e.kind = edge_kind_from(je.at("kind").get<std::string>());
    if (e.kind == EdgeKind::loop) {
      e.q = je.at("q").get<std::size_t>();
      e.r = je.at("r").get<unsigned>();
      e.group = kNoGroup;
    } else if (je.contains("group") && !je["group"].is_null()) {
      e.group = je["group"].get<std::size_t>();
    }
    k.edges.push_back(e);
  }
  k.reindex();
  bool grouped = false;
  for (const auto& jt : j.at("triangles")) {
    k.triangles.push_back({{jt.at("v0").get<std::size_t>(), jt.at("v1").get<std::size_t>(),
                            jt.at("v2").get<std::size_t>()}});
    if (jt.contains("group")) grouped = true;
  }
  if (grouped) {
    for (const auto& jt : j.at("triangles")) {
      k.group_of_triangle.push_back(jt.contains("group") ? jt["group"].get<std::size_t>() : kNoGroup);
    }
  }
  if (j.contains("central")) k.central = j["central"].get<std::vector<std::size_t>>();
  if (j.contains("loops")) k.loops = j["loops"].get<std::vector<std::array<std::size_t, 3>>>();
  return k;
}

json tube_json(const TubeRecord& t) {
  return json{{"q", t.q},
              {"variable", t.variable},
              {"copy", t.copy},
              {"sign", t.sign},
              {"triangles", t.triangles},
              {"loop_triangle", t.loop_triangle}};
}

json back_map_json(const BackMap& m) {
  json j{{"stage", m.stage}, {"kind", map_kind_name(m.kind)}, {"n_in", m.n_in}, {"n_out", m.n_out}};
  if (m.kind == BackMap::Kind::select) j["index"] = m.index;
  return j;
}

}  // namespace

std::string da_system_to_json(const WeightedDASystem& s) {
  json rows = json::array();
  for (const auto& r : s.rows) {
    json jr{{"kind", kind_name(r.kind)}, {"i", r.i}, {"j", r.j}};
    jr["k"] = r.kind == DAKind::average ? json(r.k) : json(nullptr);
    jr["weight"] = r.weight;
    jr["scale"] = r.scale;
    jr["rhs"] = r.rhs;
    jr["source"] = r.source_row;
    rows.push_back(jr);
  }
  json j{{"n_vars", s.n_vars}, {"n_main", s.n_main}, {"n_aux", s.n_aux}, {"rows", rows}};
  return j.dump(1);
}

WeightedDASystem da_system_from_json(const std::string& text) {
  json j = json::parse(text);
  WeightedDASystem s;
  s.n_vars = j.at("n_vars").get<std::size_t>();
  for (const auto& jr : j.at("rows")) {
    DARow r;
    r.kind = kind_from(jr.at("kind").get<std::string>());
    r.i = jr.at("i").get<std::size_t>();
    r.j = jr.at("j").get<std::size_t>();
    if (r.kind == DAKind::average) r.k = jr.at("k").get<std::size_t>();
    r.weight = jr.value("weight", 1.0);
    r.scale = jr.value("scale", 1.0);
    r.rhs = jr.value("rhs", 0.0);
    r.source_row = jr.value("source", s.rows.size());
    s.rows.push_back(r);
  }
  s.n_main = j.value("n_main", s.rows.size());
  s.n_aux = j.value("n_aux", std::size_t{0});
  if (s.n_main + s.n_aux != s.rows.size()) throw std::invalid_argument("DA json: row counts disagree");
  return s;
}

std::string complex_to_json(const Complex2& k) { return complex_json(k).dump(1); }

Complex2 complex_from_json(const std::string& text) { return complex_from(json::parse(text)); }

std::string sidecar_to_json(const BoundaryProblem& p, bool zero_solution) {
  json tubes = json::array();
  for (const auto& t : p.tubes) tubes.push_back(tube_json(t));
  json j{{"n_triangles", p.d2.cols()},
         {"n_variables", p.n_variables},
         {"n_equations", p.n_equations},
         {"central", p.central},
         {"zero_solution", zero_solution},
         {"tubes", tubes}};
  return j.dump(1);
}

BoundarySidecar sidecar_from_json(const std::string& text) {
  json j = json::parse(text);
  BoundarySidecar s;
  s.n_triangles = j.at("n_triangles").get<std::size_t>();
  s.central = j.at("central").get<std::vector<std::size_t>>();
  s.zero_solution = j.value("zero_solution", false);
  for (const auto& jt : j.at("tubes")) {
    TubeRecord t;
    t.q = jt.at("q").get<std::size_t>();
    t.variable = jt.at("variable").get<std::size_t>();
    t.copy = jt.at("copy").get<unsigned>();
    t.sign = jt.at("sign").get<int>();
    t.triangles = jt.at("triangles").get<std::array<std::size_t, 6>>();
    t.loop_triangle = jt.at("loop_triangle").get<std::array<std::size_t, 3>>();
    s.tubes.push_back(t);
  }
  return s;
}

std::string back_map_to_json(const BackMap& m) { return back_map_json(m).dump(1); }

BackMap back_map_from_json(const std::string& text) {
  json j = json::parse(text);
  const std::string kind = j.at("kind").get<std::string>();
  const std::string stage = j.value("stage", std::string{});
  const auto n_in = j.at("n_in").get<std::size_t>();
  const auto n_out = j.at("n_out").get<std::size_t>();
  if (kind == "select") return BackMap::select(n_in, j.at("index").get<std::vector<std::size_t>>(), stage);
  if (kind == "shift") {
    if (n_in != n_out + 1) throw std::invalid_argument("back map json: bad shift sizes");
    return BackMap::shift_by_last(n_out, stage);
  }
  if (kind == "zero") return BackMap::zero(n_in, n_out, stage);
  throw std::invalid_argument("back map json: unknown kind '" + kind + "'");
}

std::string network_to_json(const FlowNetwork2& net) {
  json j{{"complex", complex_json(net.complex)},
         {"capacity", net.capacity},
         {"gamma", net.gamma},
         {"f_star", net.f_star}};
  return j.dump(1);
}

FlowNetwork2 network_from_json(const std::string& text) {
  json j = json::parse(text);
  return make_flow_network(complex_from(j.at("complex")), j.at("capacity").get<Vector>(),
                           j.at("gamma").get<Vector>(), j.value("f_star", 0.0));
}

std::string read_text(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << text;
  if (text.empty() || text.back() != '\n') os << '\n';
}

}  // namespace sle
