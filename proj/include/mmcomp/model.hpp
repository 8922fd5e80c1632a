#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmcomp {

/// Market and model constants for the reference maker versus the pooled competitor.
///
/// `a_tilde` and `b_tilde` are the competitor's base levels with the tick already
/// folded in, so the depths produced by competitor_depths() are one tick more
/// generous than what the competitor actually posts. `tick` is kept only for
/// reporting.
struct ModelParams {
  double sigma = 1.0;
  double lambda_a = 10.0;
  double lambda_b = 10.0;
  double kappa = 2.0;
  double beta = 0.05;
  double a_tilde = 0.1;
  double b_tilde = 0.1;
  double gamma = 0.03;
  double phi = 0.1;
  double sigma_z = 1.0;
  int q_min = -10;
  int q_max = 10;
  double horizon = 1.0;
  double s0 = 100.0;
  double tick = 0.01;

  int n_inventory() const { return q_max - q_min + 1; }
  std::size_t index_of(int q) const { return static_cast<std::size_t>(q - q_min); }
  bool in_range(int q) const { return q >= q_min && q <= q_max; }

  bool operator==(const ModelParams&) const = default;
};

/// Every sign/positivity violation, one message per offending field. Empty when valid.
inline std::vector<std::string> violations(const ModelParams& p) {
  std::vector<std::string> out;
  auto need = [&out](bool ok, const char* key, const char* what) {
    if (!ok) out.push_back(std::string(key) + ": " + what);
  };
  auto finite = [](double x) { return std::isfinite(x); };
  need(finite(p.sigma) && p.sigma > 0, "sigma", "must be > 0");
  need(finite(p.lambda_a) && p.lambda_a >= 0, "lambda_a", "must be >= 0");
  need(finite(p.lambda_b) && p.lambda_b >= 0, "lambda_b", "must be >= 0");
  need(finite(p.kappa) && p.kappa > 0, "kappa", "must be > 0");
  need(finite(p.beta) && p.beta > 0, "beta", "must be > 0");
  need(finite(p.a_tilde) && p.a_tilde > 0, "a_tilde", "must be > 0");
  need(finite(p.b_tilde) && p.b_tilde > 0, "b_tilde", "must be > 0");
  need(finite(p.gamma) && p.gamma >= 0, "gamma", "must be >= 0");
  need(finite(p.phi) && p.phi >= 0, "phi", "must be >= 0");
  need(finite(p.sigma_z) && p.sigma_z >= 0, "sigma_z", "must be >= 0");
  need(p.q_min < 0, "q_min", "must be < 0");
  need(p.q_max > 0, "q_max", "must be > 0");
  need(finite(p.horizon) && p.horizon > 0, "horizon", "must be > 0");
  need(finite(p.s0), "s0", "must be finite");
  need(finite(p.tick) && p.tick >= 0, "tick", "must be >= 0");
  return out;
}

inline void validate(const ModelParams& p) {
  const auto errs = violations(p);
  if (errs.empty()) return;
  std::string msg = "invalid model parameters:";
  for (const auto& e : errs) msg += "\n  " + e;
  throw std::invalid_argument(msg);
}

/// One market snapshot. `q` is the reference inventory, `q_tilde` the competitor's.
struct SimState {
  double t = 0.0;
  double s = 0.0;
  double x = 0.0;
  int q = 0;
  std::int64_t q_tilde = 0;
  double z = 0.0;
  double running_penalty = 0.0;

  bool operator==(const SimState&) const = default;
};

/// Posted depths. A side that is not posted keeps depth 0 and must be ignored.
struct DepthPair {
  double ask = 0.0;
  double bid = 0.0;
  bool ask_posted = true;
  bool bid_posted = true;

  bool operator==(const DepthPair&) const = default;
};

/// A strategy's quote plus whether each side was pushed up to the competitor level.
struct PolicyDepths {
  DepthPair depths;
  bool ask_truncated = false;
  bool bid_truncated = false;

  bool any_truncated() const {
    return (depths.ask_posted && ask_truncated) || (depths.bid_posted && bid_truncated);
  }
};

enum class Side { Ask, Bid };

/// Competitor depths under the linear inventory rule; always two-sided and unclamped.
inline DepthPair competitor_depths(const ModelParams& p, std::int64_t q_tilde, double z) {
  const double shift = p.beta * static_cast<double>(q_tilde) + z;
  return DepthPair{p.a_tilde - shift, p.b_tilde + shift, true, true};
}

/// Probability that an arriving market order trades with the reference maker.
inline double fill_probability(const ModelParams& p, double my_depth, double competitor_depth) {
  const double gap = my_depth - competitor_depth;
  if (gap <= 0.0) return 1.0;
  return std::min(std::exp(-p.kappa * gap), 1.0);
}

/// Inventory marked at the competitor midprice.
inline double inventory_mark(const ModelParams& p, int q, double s, std::int64_t q_tilde, double z) {
  const double mid_offset =
      0.5 * (p.a_tilde - p.b_tilde) - p.beta * static_cast<double>(q_tilde) - z;
  return static_cast<double>(q) * (s + mid_offset);
}

/// Realized objective of a finished path.
inline double terminal_value(const ModelParams& p, const SimState& st) {
  const double q = static_cast<double>(st.q);
  return st.x + inventory_mark(p, st.q, st.s, st.q_tilde, st.z) - p.gamma * q * q -
         st.running_penalty;
}

}  // namespace mmcomp
