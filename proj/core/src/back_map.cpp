#include "sle/back_map.hpp"

#include <numeric>
#include <stdexcept>

namespace sle {

BackMap BackMap::identity(std::size_t n, std::string stage) {
  return leading(n, n, std::move(stage));
}

BackMap BackMap::leading(std::size_t n_in, std::size_t n_out, std::string stage) {
  if (n_out > n_in) throw std::invalid_argument("BackMap::leading: n_out > n_in");
  std::vector<std::size_t> idx(n_out);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return select(n_in, std::move(idx), std::move(stage));
}

BackMap BackMap::shift_by_last(std::size_t n_out, std::string stage) {
  BackMap m;
  m.kind = Kind::shift;
  m.n_in = n_out + 1;
  m.n_out = n_out;
  m.stage = std::move(stage);
  return m;
}

BackMap BackMap::zero(std::size_t n_in, std::size_t n_out, std::string stage) {
  BackMap m;
  m.kind = Kind::zero;
  m.n_in = n_in;
  m.n_out = n_out;
  m.stage = std::move(stage);
  return m;
}

BackMap BackMap::select(std::size_t n_in, std::vector<std::size_t> index, std::string stage) {
  for (std::size_t i : index) {
    if (i >= n_in) throw std::invalid_argument("BackMap::select: index out of range");
  }
  BackMap m;
  m.kind = Kind::select;
  m.n_in = n_in;
  m.n_out = index.size();
  m.index = std::move(index);
  m.stage = std::move(stage);
  return m;
}

Vector BackMap::apply(std::span<const double> in) const {
  if (in.size() != n_in) {
    throw std::invalid_argument("back map '" + stage + "': expected " + std::to_string(n_in) +
                                " values, got " + std::to_string(in.size()));
  }
  Vector out(n_out, 0.0);
  switch (kind) {
    case Kind::select:
      for (std::size_t i = 0; i < n_out; ++i) out[i] = in[index[i]];
      break;
    case Kind::shift:
      for (std::size_t i = 0; i < n_out; ++i) out[i] = in[i] - in[n_out];
      break;
    case Kind::zero:
      break;
  }
  return out;
}

Vector apply_chain(const std::vector<BackMap>& maps, std::span<const double> in) {
  Vector cur(in.begin(), in.end());
  for (const auto& m : maps) cur = m.apply(cur);
  return cur;
}

}  // namespace sle
