#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mmcomp/closed_form.hpp"
#include "mmcomp/depths.hpp"
#include "mmcomp/model.hpp"
#include "mmcomp/value_table.hpp"

namespace mmcomp {

/// Non-finite value produced during the backward sweep.
class SolverBlowUp : public std::runtime_error {
 public:
  SolverBlowUp(long step, int q)
      : std::runtime_error("solve_backward: non-finite g at step " + std::to_string(step) +
                           ", q=" + std::to_string(q) + " (explicit Euler unstable, increase n_steps)"),
        step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

/// Which Hamiltonian the sweep uses.
enum class HamiltonianMode {
  Truncated,  ///< true problem: fill probability capped at one
  Untruncated ///< the exponential branch everywhere (the equation the closed form solves)
};

/// One side's contribution sup_c lambda * min(exp(-kappa (c + beta/2 - base)), 1) * (c + delta_g),
/// delta_g = g(t, q-+1) - g(t, q).
inline double hamiltonian_side(const ModelParams& p, Side side, double delta_g,
                               HamiltonianMode mode = HamiltonianMode::Truncated) {
  const double lambda = side == Side::Ask ? p.lambda_a : p.lambda_b;
  if (lambda == 0.0) return 0.0;
  const double base = side == Side::Ask ? p.a_tilde : p.b_tilde;
  const double kink = base - 0.5 * p.beta;
  const double c_hat = 1.0 / p.kappa - delta_g;
  if (mode == HamiltonianMode::Untruncated || c_hat >= kink)
    return lambda / p.kappa * std::exp(-1.0 - p.kappa * (0.5 * p.beta - base) + p.kappa * delta_g);
  // Capped region: the objective is increasing in c up to the kink.
  return lambda * (kink + delta_g);
}

/// g(t, q) from the backward explicit Euler sweep, stored every `stride` steps.
class ValueGrid {
 public:
  ValueGrid(GTable g, long n_steps, HamiltonianMode mode)
      : g_(std::move(g)), n_steps_(n_steps), mode_(mode) {}

  const TimeGrid& time_grid() const { return g_.grid(); }
  int q_min() const { return g_.q_min(); }
  int q_max() const { return g_.q_max(); }
  /// Number of Euler steps actually taken (may exceed the stored grid's steps).
  long solver_steps() const { return n_steps_; }
  HamiltonianMode mode() const { return mode_; }

  double g_at(long i, int q) const { return g_.at(i, q); }
  double g(double t, int q) const { return g_.value(t, q); }
  const GTable& table() const { return g_; }

 private:
  GTable g_;
  long n_steps_;
  HamiltonianMode mode_;
};

struct EulerOptions {
  HamiltonianMode mode = HamiltonianMode::Truncated;
  /// Store every stride-th time row; must divide n_steps.
  long stride = 1;
};

/// Backward explicit Euler for
///   0 = dg/dt - phi q^2 + (lambda_a - lambda_b) beta q + H_ask 1{q > q_min} + H_bid 1{q < q_max}
/// from the terminal row g(T, q).
inline ValueGrid solve_backward(const ModelParams& p, long n_steps, EulerOptions opts = {}) {
  validate(p);
  if (n_steps < 1) throw std::invalid_argument("solve_backward: n_steps must be >= 1");
  if (opts.stride < 1 || n_steps % opts.stride != 0)
    throw std::invalid_argument("solve_backward: stride must divide n_steps");

  const int n = p.n_inventory();
  const double dt = p.horizon / static_cast<double>(n_steps);
  GTable stored(TimeGrid(p.horizon, n_steps / opts.stride), p.q_min, p.q_max);

  std::vector<double> drift(static_cast<std::size_t>(n));
  std::vector<double> g(static_cast<std::size_t>(n));
  std::vector<double> next(static_cast<std::size_t>(n));
  for (int q = p.q_min; q <= p.q_max; ++q) {
    const double qd = static_cast<double>(q);
    drift[p.index_of(q)] = -p.phi * qd * qd + (p.lambda_a - p.lambda_b) * p.beta * qd;
    g[p.index_of(q)] = terminal_g(p, q);
  }
  const long last_row = stored.grid().n_steps();
  for (int q = p.q_min; q <= p.q_max; ++q) stored.at(last_row, q) = g[p.index_of(q)];

  for (long step = n_steps - 1; step >= 0; --step) {
    for (int k = 0; k < n; ++k) {
      double rhs = drift[static_cast<std::size_t>(k)];
      const double gk = g[static_cast<std::size_t>(k)];
      if (k > 0) rhs += hamiltonian_side(p, Side::Ask, g[static_cast<std::size_t>(k - 1)] - gk, opts.mode);
      if (k < n - 1)
        rhs += hamiltonian_side(p, Side::Bid, g[static_cast<std::size_t>(k + 1)] - gk, opts.mode);
      const double updated = gk + dt * rhs;
      if (!std::isfinite(updated)) throw SolverBlowUp(step, p.q_min + k);
      next[static_cast<std::size_t>(k)] = updated;
    }
    g.swap(next);
    if (step % opts.stride == 0) {
      const long row = step / opts.stride;
      for (int q = p.q_min; q <= p.q_max; ++q) stored.at(row, q) = g[p.index_of(q)];
    }
  }
  return ValueGrid(std::move(stored), n_steps, opts.mode);
}

/// The Euler benchmark policy: unrestrained depths from the Euler g, floored at the competitor.
inline PolicyDepths euler_policy(const ModelParams& p, const ValueGrid& grid, double t, int q,
                                 std::int64_t q_tilde, double z) {
  return truncated_depths(p, grid, t, q, q_tilde, z);
}

}  // namespace mmcomp
