#pragma once

#include <string>
#include <vector>

#include "sle/b2_reduce.hpp"
#include "sle/back_map.hpp"
#include "sle/complex2.hpp"
#include "sle/da_reduce.hpp"
#include "sle/maxflow_ipm.hpp"

namespace sle {

// All writers produce deterministic, pretty-printed JSON text.

std::string da_system_to_json(const WeightedDASystem& s);
WeightedDASystem da_system_from_json(const std::string& text);

std::string complex_to_json(const Complex2& k);
Complex2 complex_from_json(const std::string& text);

/// Sidecar sufficient to map a flow back to DA variables without the complex.
struct BoundarySidecar {
  std::size_t n_triangles = 0;
  std::vector<std::size_t> central;
  bool zero_solution = false;
  std::vector<TubeRecord> tubes;
};

std::string sidecar_to_json(const BoundaryProblem& p, bool zero_solution);
BoundarySidecar sidecar_from_json(const std::string& text);

std::string back_map_to_json(const BackMap& m);
BackMap back_map_from_json(const std::string& text);

std::string network_to_json(const FlowNetwork2& net);
/// Rebuilds and revalidates the network (capacities, demand in the image).
FlowNetwork2 network_from_json(const std::string& text);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace sle
