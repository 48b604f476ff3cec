#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sle/complex2.hpp"
#include "sle/sparse_matrix.hpp"

namespace sle {

/// Maximize F subject to d2 f = F gamma and -c <= f <= c.
struct FlowNetwork2 {
  Complex2 complex;
  SparseMatrix d2;
  Vector capacity;  // per triangle, > 0
  Vector gamma;     // per edge, in im(d2)
  double f_star = 0.0;
};

/// Validates capacities and that gamma lies in im(d2) to 1e-8 relative.
/// When f_star <= 0 it is estimated by bisection.
FlowNetwork2 make_flow_network(Complex2 k, Vector capacity, Vector gamma, double f_star = 0.0);

/// The network of one difference equation x1 - x2 = 1 with unit capacities; F* = 2.
FlowNetwork2 single_tube_network();

struct BarrierState {
  Vector f;
  double alpha = 0.0;
};

struct StepRecord {
  std::size_t step = 0;
  std::string kind;  // "progress" or "centering"
  double alpha = 0.0;
  double potential = 0.0;
  double residual = 0.0;  // ||d2 f - alpha F* gamma||
  double alpha_prime = 0.0;
  double damping = 1.0;
  unsigned retries = 0;
  bool accepted = true;
};

/// Barrier potential sum -log(c - f) - log(c + f); +inf outside the box.
double barrier_value(std::span<const double> c, std::span<const double> f);
/// Gradient and Hessian diagonal of the barrier. Throws at or beyond the box.
std::pair<Vector, Vector> barrier_derivatives(std::span<const double> c, std::span<const double> f);

class BoundaryContact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RetryExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Newton step toward d2 f = (alpha + alpha') F* gamma in the H^{-1/2}-scaled
/// variable; alpha' is halved (at most 40 times) until the step stays interior.
BarrierState progress_step(const FlowNetwork2& net, const BarrierState& s, double alpha_prime,
                           StepRecord* rec = nullptr);
/// Newton step with no demand increment, backtracked until the barrier does not increase.
BarrierState centering_step(const FlowNetwork2& net, const BarrierState& s,
                            StepRecord* rec = nullptr);

double demand_residual(const FlowNetwork2& net, const BarrierState& s);

struct IpmResult {
  BarrierState best;
  double alpha_final = 0.0;
  std::vector<StepRecord> log;
};

/// alpha' for the current state; the default is 1/(20 sqrt(t)) capped by (1 - alpha)/2.
using AlphaSchedule = std::function<double(const FlowNetwork2&, const BarrierState&)>;
double default_alpha_prime(const FlowNetwork2& net, const BarrierState& s);

/// Alternates progress and centering steps; stops early once alpha >= target_alpha.
IpmResult run_ipm(const FlowNetwork2& net, std::size_t steps, AlphaSchedule schedule = {},
                  double target_alpha = 1.0);

/// Largest F (to relative precision tol) for which the IPM reaches alpha >= 0.999.
double estimate_f_star(const Complex2& k, std::span<const double> capacity,
                       std::span<const double> gamma, double tol = 1e-3);

}  // namespace sle
