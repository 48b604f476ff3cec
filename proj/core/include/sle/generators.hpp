#pragma once

#include <cstdint>
#include <random>

#include "sle/da_reduce.hpp"

namespace sle {

using Rng = std::mt19937_64;

struct DAInstanceSpec {
  std::size_t n = 10;              // variables
  std::size_t d = 15;              // equations (at least enough to touch every variable)
  double average_fraction = 0.3;
  std::int64_t rhs_bound = 10;     // difference right-hand sides drawn from [-bound, bound]
};

/**
 * Random DA system in which every variable occurs. Average rows are
 * homogeneous. With planted = true the right-hand sides come from an integer
 * solution x*, which is also returned; averages are then only drawn where
 * x* satisfies them.
 */
struct DAInstance {
  WeightedDASystem system;
  Vector b;        // canonical right-hand side
  Vector planted;  // empty unless planted
};

DAInstance random_da_instance(Rng& rng, const DAInstanceSpec& spec, bool planted);

struct GeneralInstanceSpec {
  std::size_t m = 5;
  std::size_t n = 8;
  std::int64_t max_entry = 50;
  std::size_t row_nnz_min = 2;
  std::size_t row_nnz_max = 4;
  double kappa_limit = 1e4;
  std::int64_t rhs_bound = 20;
};

/// Full-row-rank integer system (m <= n, so every b is consistent) with
/// condition number below the limit; rejected draws are redrawn.
GeneralSystem random_general_system(Rng& rng, const GeneralInstanceSpec& spec);

/// Random integer system of class G_z2 (zero row sums, power-of-two positive sums).
GeneralSystem random_gz2_system(Rng& rng, std::size_t m, std::size_t n, std::int64_t max_entry);

}  // namespace sle
