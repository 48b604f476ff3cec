#include "sle/maxflow_ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sle/b2_reduce.hpp"
#include "sle/least_squares.hpp"
#include "sle/spectral.hpp"

namespace sle {

namespace {

constexpr unsigned kMaxRetries = 40;

bool strictly_inside(std::span<const double> c, std::span<const double> f) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i] - f[i] > 0.0 && c[i] + f[i] > 0.0)) return false;
  }
  return true;
}

// Newton direction minimizing g^T d + d^T H d / 2 subject to d2 d = r:
// d = H^{-1/2} u, u = v - H^{-1/2} g, v the minimum-norm solution of
// (d2 H^{-1/2}) v = r + d2 H^{-1} g.
Vector newton_direction(const FlowNetwork2& net, const Vector& f, const Vector& r) {
  auto [g, h] = barrier_derivatives(net.capacity, f);
  const std::size_t t = f.size();
  Vector hinv_sqrt(t), scaled_g(t);
  for (std::size_t i = 0; i < t; ++i) {
    hinv_sqrt[i] = 1.0 / std::sqrt(h[i]);
    scaled_g[i] = g[i] * hinv_sqrt[i];
  }
  SparseMatrix m = net.d2.scaled({}, hinv_sqrt);
  Vector rhs = matvec(m, scaled_g);
  for (std::size_t e = 0; e < rhs.size(); ++e) rhs[e] += r[e];
  LsqrOptions o;
  o.atol = 1e-15;
  o.btol = 1e-15;
  o.max_iter = std::max<std::size_t>(2000, 20 * (m.rows() + m.cols()));
  Vector v = lsqr(m, rhs, o).x;
  Vector dir(t);
  for (std::size_t i = 0; i < t; ++i) dir[i] = hinv_sqrt[i] * (v[i] - scaled_g[i]);
  return dir;
}

Vector demand_gap(const FlowNetwork2& net, const Vector& f, double alpha) {
  Vector r = matvec(net.d2, f);
  for (std::size_t e = 0; e < r.size(); ++e) r[e] = alpha * net.f_star * net.gamma[e] - r[e];
  return r;
}

}  // namespace

double barrier_value(std::span<const double> c, std::span<const double> f) {
  if (c.size() != f.size()) throw std::invalid_argument("barrier_value: size mismatch");
  double v = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double lo = c[i] + f[i];
    const double hi = c[i] - f[i];
    if (!(lo > 0.0 && hi > 0.0)) return std::numeric_limits<double>::infinity();
    v -= std::log(hi) + std::log(lo);
  }
  return v;
}

std::pair<Vector, Vector> barrier_derivatives(std::span<const double> c, std::span<const double> f) {
  if (c.size() != f.size()) throw std::invalid_argument("barrier_derivatives: size mismatch");
  Vector g(c.size()), h(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double hi = c[i] - f[i];
    const double lo = c[i] + f[i];
    if (!(hi > 0.0 && lo > 0.0)) {
      throw BoundaryContact("barrier: flow touches capacity on triangle " + std::to_string(i));
    }
    g[i] = 1.0 / hi - 1.0 / lo;
    h[i] = 1.0 / (hi * hi) + 1.0 / (lo * lo);
  }
  return {g, h};
}

double demand_residual(const FlowNetwork2& net, const BarrierState& s) {
  return norm2(demand_gap(net, s.f, s.alpha));
}

FlowNetwork2 make_flow_network(Complex2 k, Vector capacity, Vector gamma, double f_star) {
  FlowNetwork2 net;
  net.d2 = boundary2(k);
  if (capacity.size() != net.d2.cols()) throw std::invalid_argument("flow network: capacity size mismatch");
  if (gamma.size() != net.d2.rows()) throw std::invalid_argument("flow network: demand size mismatch");
  for (double c : capacity) {
    if (!(c > 0.0)) throw std::invalid_argument("flow network: capacities must be positive");
  }
  const double gn = norm2(gamma);
  if (gn > 0.0) {
    Vector p = projection_estimate(net.d2, gamma);
    if (norm2(subtract(gamma, p)) > 1e-8 * gn) {
      throw std::invalid_argument("flow network: demand is not in the boundary image");
    }
  }
  net.complex = std::move(k);
  net.capacity = std::move(capacity);
  net.gamma = std::move(gamma);
  net.f_star = f_star > 0.0 ? f_star
                            : (gn == 0.0 ? 0.0 : estimate_f_star(net.complex, net.capacity, net.gamma));
  return net;
}

FlowNetwork2 single_tube_network() {
  DARow row;
  row.kind = DAKind::difference;
  row.i = 0;
  row.j = 1;
  row.rhs = 1.0;
  WeightedDASystem sys = make_da_system(2, {row});
  BoundaryProblem p = reduce_da_to_b2(sys);
  Vector cap(p.d2.cols(), 1.0);
  return make_flow_network(p.complex, cap, p.gamma, 2.0);
}

BarrierState progress_step(const FlowNetwork2& net, const BarrierState& s, double alpha_prime,
                           StepRecord* rec) {
  if (!(alpha_prime >= 0.0) || s.alpha + alpha_prime >= 1.0) {
    throw std::invalid_argument("progress_step: need alpha + alpha' < 1");
  }
  double ap = alpha_prime;
  for (unsigned retry = 0; retry <= kMaxRetries; ++retry) {
    Vector r = demand_gap(net, s.f, s.alpha + ap);
    Vector dir = newton_direction(net, s.f, r);
    Vector next = s.f;
    axpy(1.0, dir, next);
    if (strictly_inside(net.capacity, next)) {
      BarrierState out{std::move(next), s.alpha + ap};
      if (rec) {
        rec->kind = "progress";
        rec->alpha_prime = ap;
        rec->retries = retry;
        rec->accepted = true;
        rec->alpha = out.alpha;
        rec->potential = barrier_value(net.capacity, out.f);
        rec->residual = demand_residual(net, out);
      }
      return out;
    }
    ap *= 0.5;
  }
  throw RetryExhausted("progress_step: no interior step after 40 halvings of alpha'");
}

BarrierState centering_step(const FlowNetwork2& net, const BarrierState& s, StepRecord* rec) {
  const double v0 = barrier_value(net.capacity, s.f);
  Vector r = demand_gap(net, s.f, s.alpha);
  Vector dir = newton_direction(net, s.f, r);
  double damping = 1.0;
  for (unsigned retry = 0; retry <= kMaxRetries; ++retry) {
    Vector next = s.f;
    axpy(damping, dir, next);
    const double v1 = barrier_value(net.capacity, next);
    if (std::isfinite(v1) && v1 <= v0 + 1e-12) {
      BarrierState out{std::move(next), s.alpha};
      if (rec) {
        rec->kind = "centering";
        rec->damping = damping;
        rec->retries = retry;
        rec->accepted = true;
        rec->alpha = out.alpha;
        rec->potential = v1;
        rec->residual = demand_residual(net, out);
      }
      return out;
    }
    damping *= 0.5;
  }
  if (rec) {
    rec->kind = "centering";
    rec->damping = 0.0;
    rec->retries = kMaxRetries;
    rec->accepted = false;
    rec->alpha = s.alpha;
    rec->potential = v0;
    rec->residual = demand_residual(net, s);
  }
  return s;
}

double default_alpha_prime(const FlowNetwork2& net, const BarrierState& s) {
  const double base = 1.0 / (20.0 * std::sqrt(static_cast<double>(net.d2.cols())));
  return std::min(base, 0.5 * (1.0 - s.alpha));
}

IpmResult run_ipm(const FlowNetwork2& net, std::size_t steps, AlphaSchedule schedule,
                  double target_alpha) {
  if (!schedule) schedule = default_alpha_prime;
  IpmResult res;
  BarrierState s{Vector(net.d2.cols(), 0.0), 0.0};
  res.best = s;
  if (net.f_star == 0.0 || norm2(net.gamma) == 0.0) {
    res.alpha_final = 0.0;
    return res;
  }
  for (std::size_t step = 1; step <= steps; ++step) {
    StepRecord pr;
    pr.step = step;
    try {
      s = progress_step(net, s, schedule(net, s), &pr);
    } catch (const RetryExhausted&) {
      pr.kind = "progress";
      pr.accepted = false;
      pr.alpha = s.alpha;
      pr.potential = barrier_value(net.capacity, s.f);
      pr.residual = demand_residual(net, s);
    }
    res.log.push_back(pr);
    StepRecord cr;
    cr.step = step;
    s = centering_step(net, s, &cr);
    res.log.push_back(cr);
    if (s.alpha >= res.best.alpha) res.best = s;
    if (s.alpha >= target_alpha) break;
  }
  res.alpha_final = res.best.alpha;
  return res;
}

double estimate_f_star(const Complex2& k, std::span<const double> capacity,
                       std::span<const double> gamma, double tol) {
  FlowNetwork2 probe;
  probe.d2 = boundary2(k);
  probe.capacity.assign(capacity.begin(), capacity.end());
  probe.gamma.assign(gamma.begin(), gamma.end());
  const double gn = norm2(gamma);
  if (gn == 0.0) return 0.0;
  // ||F gamma|| = ||d2 f|| <= sigma_max ||c||
  double hi = 1.01 * estimate_sigma_max(probe.d2) * norm2(capacity) / gn;
  double lo = 0.0;
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    probe.f_star = mid;
    IpmResult r = run_ipm(probe, 400, {}, 0.999);
    (r.alpha_final >= 0.999 ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace sle
