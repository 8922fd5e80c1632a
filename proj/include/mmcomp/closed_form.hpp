#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmcomp/depths.hpp"
#include "mmcomp/expm.hpp"
#include "mmcomp/model.hpp"
#include "mmcomp/value_table.hpp"

namespace mmcomp {

/// Raised when the closed-form solution is requested outside its symmetric-bounds setting.
class AssumptionViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_symmetric_bounds(const ModelParams& p) {
  if (p.q_max != -p.q_min)
    throw AssumptionViolation("closed-form solution requires q_max == -q_min (got q_min=" +
                              std::to_string(p.q_min) + ", q_max=" + std::to_string(p.q_max) + ")");
}

/// Rate at which a side's neighbour feeds omega in the linear ODE system.
inline double coupling_rate(const ModelParams& p, Side side) {
  const double lambda = side == Side::Ask ? p.lambda_a : p.lambda_b;
  const double base = side == Side::Ask ? p.a_tilde : p.b_tilde;
  return lambda * std::exp(-1.0 - p.kappa * (0.5 * p.beta - base));
}

/// Tridiagonal generator A with omega(t) = exp(A (T - t)) v.
///
/// Row q carries the ODE for omega(., q): the ask coupling multiplies omega(., q-1) and
/// sits at column q-1, the bid coupling multiplies omega(., q+1) at column q+1.
inline Matrix build_generator(const ModelParams& p) {
  require_symmetric_bounds(p);
  const int n = p.n_inventory();
  const double up = coupling_rate(p, Side::Ask);
  const double down = coupling_rate(p, Side::Bid);
  Matrix a = Matrix::Zero(n, n);
  for (int q = p.q_min; q <= p.q_max; ++q) {
    const auto i = static_cast<Eigen::Index>(p.index_of(q));
    const double qd = static_cast<double>(q);
    a(i, i) = -p.phi * p.kappa * qd * qd + p.beta * p.kappa * (p.lambda_a - p.lambda_b) * qd;
    if (q > p.q_min) a(i, i - 1) = up;
    if (q < p.q_max) a(i, i + 1) = down;
  }
  return a;
}

/// Terminal condition for g, shared with the backward Euler solver.
inline double terminal_g(const ModelParams& p, int q) {
  const double qd = static_cast<double>(q);
  return 0.5 * (p.a_tilde - p.b_tilde) * qd - (p.gamma - 0.5 * p.beta) * qd * qd;
}

inline Vector terminal_vector(const ModelParams& p) {
  Vector v(p.n_inventory());
  for (int q = p.q_min; q <= p.q_max; ++q)
    v(static_cast<Eigen::Index>(p.index_of(q))) = std::exp(p.kappa * terminal_g(p, q));
  return v;
}

/// omega(t_i, q) on a uniform time grid, with g = log(omega) / kappa alongside.
class OmegaTable {
 public:
  OmegaTable(TimeGrid grid, int q_min, int q_max, double kappa)
      : omega_(grid, q_min, q_max), g_(grid, q_min, q_max), kappa_(kappa) {}

  const TimeGrid& time_grid() const { return omega_.grid(); }
  int q_min() const { return omega_.q_min(); }
  int q_max() const { return omega_.q_max(); }

  double omega(long i, int q) const { return omega_.at(i, q); }
  double g_at(long i, int q) const { return g_.at(i, q); }
  /// g at arbitrary t, linear in log omega between nodes.
  double g(double t, int q) const { return g_.value(t, q); }

  Vector row(long i) const {
    Vector out(omega_.n_inventory());
    for (int q = q_min(); q <= q_max(); ++q) out(q - q_min()) = omega_.at(i, q);
    return out;
  }

  const GTable& g_table() const { return g_; }

  /// Overrides g on a node where it is known in closed form (the terminal row).
  void set_exact_g(long i, int q, double value) { g_.at(i, q) = value; }

  void set_row(long i, const Vector& w) {
    for (int q = q_min(); q <= q_max(); ++q) {
      const double value = w(q - q_min());
      if (!(value > 0.0) || !std::isfinite(value))
        throw std::runtime_error("solve_omega: omega lost positivity at t=" +
                                 std::to_string(time_grid().time(i)) + ", q=" + std::to_string(q));
      omega_.at(i, q) = value;
      g_.at(i, q) = std::log(value) / kappa_;
    }
  }

 private:
  GTable omega_;
  GTable g_;
  double kappa_;
};

inline OmegaTable solve_omega(const ModelParams& p, long n_time = 1000) {
  validate(p);
  if (n_time < 1) throw std::invalid_argument("solve_omega: n_time must be >= 1");
  const TimeGrid grid(p.horizon, n_time);
  const Matrix a = build_generator(p);
  const ExpmStepper stepper(a, grid.dt());

  OmegaTable table(grid, p.q_min, p.q_max, p.kappa);
  Vector w = terminal_vector(p);
  table.set_row(n_time, w);
  for (int q = p.q_min; q <= p.q_max; ++q) table.set_exact_g(n_time, q, terminal_g(p, q));
  for (long i = n_time - 1; i >= 0; --i) {
    w = stepper.step_matrix() * w;
    table.set_row(i, w);
  }
  return table;
}

/// The delta** policy: closed-form depths floored at the competitor.
inline PolicyDepths closed_form_depths(const ModelParams& p, const OmegaTable& omega, double t, int q,
                                       std::int64_t q_tilde, double z) {
  return truncated_depths(p, omega, t, q, q_tilde, z);
}

}  // namespace mmcomp
