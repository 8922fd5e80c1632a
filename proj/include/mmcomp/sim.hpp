#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmcomp/model.hpp"
#include "mmcomp/rng.hpp"
#include "mmcomp/strategy.hpp"
#include "mmcomp/value_table.hpp"

namespace mmcomp {

/// A quote that posts on a side the inventory bounds suppress.
class QuoteViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// What happened during one step. Depths are the ones in force at the start of the step.
struct StepEvents {
  DepthPair mine;
  DepthPair competitor;
  bool ask_truncated = false;
  bool bid_truncated = false;
  bool buy_arrival = false;
  bool sell_arrival = false;
  bool ask_fill = false;       ///< reference sold to an arriving buy order
  bool bid_fill = false;       ///< reference bought from an arriving sell order
  bool comp_ask_fill = false;
  bool comp_bid_fill = false;

  bool generosity() const {
    return (mine.ask_posted && ask_truncated) || (mine.bid_posted && bid_truncated);
  }
};

struct StepResult {
  SimState state;
  StepEvents events;
};

inline void check_quote(const ModelParams& p, const SimState& s, const DepthPair& d) {
  if (s.q <= p.q_min && d.ask_posted)
    throw QuoteViolation("strategy posted an ask at the lower inventory bound q=" + std::to_string(s.q));
  if (s.q >= p.q_max && d.bid_posted)
    throw QuoteViolation("strategy posted a bid at the upper inventory bound q=" + std::to_string(s.q));
  if ((d.ask_posted && !std::isfinite(d.ask)) || (d.bid_posted && !std::isfinite(d.bid)))
    throw QuoteViolation("strategy posted a non-finite depth");
}

/// Advances one step given the quote in force and the step's random draws.
///
/// Order: competitor depths at the pre-step state, Bernoulli arrivals (at most one per
/// side), fills, running penalty on the post-fill inventory, price and noise diffusion.
/// `t` advances by dt; callers on a fixed grid may snap it afterwards.
inline StepResult apply_step(const ModelParams& p, const SimState& s, const PolicyDepths& quote,
                             double dt, const StepDraws& draws) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
  if (s.t + dt > p.horizon * (1.0 + 1e-9) + 1e-12)
    throw std::invalid_argument("step: t + dt exceeds the horizon");
  check_quote(p, s, quote.depths);

  StepResult r{s, {}};
  StepEvents& ev = r.events;
  SimState& n = r.state;
  ev.mine = quote.depths;
  ev.competitor = competitor_depths(p, s.q_tilde, s.z);
  ev.ask_truncated = quote.ask_truncated;
  ev.bid_truncated = quote.bid_truncated;

  ev.buy_arrival = draws.buy_uniform < p.lambda_a * dt;
  ev.sell_arrival = draws.sell_uniform < p.lambda_b * dt;

  if (ev.buy_arrival) {
    const double prob =
        ev.mine.ask_posted ? fill_probability(p, ev.mine.ask, ev.competitor.ask) : 0.0;
    if (draws.fill_ask_uniform < prob) {
      ev.ask_fill = true;
      n.x += s.s + ev.mine.ask;
      n.q -= 1;
    } else {
      ev.comp_ask_fill = true;
      n.q_tilde -= 1;
    }
  }
  if (ev.sell_arrival) {
    const double prob =
        ev.mine.bid_posted ? fill_probability(p, ev.mine.bid, ev.competitor.bid) : 0.0;
    if (draws.fill_bid_uniform < prob) {
      ev.bid_fill = true;
      n.x -= s.s - ev.mine.bid;
      n.q += 1;
    } else {
      ev.comp_bid_fill = true;
      n.q_tilde += 1;
    }
  }

  const double qd = static_cast<double>(n.q);
  n.running_penalty += p.phi * qd * qd * dt;
  const double sqrt_dt = std::sqrt(dt);
  n.s += p.sigma * sqrt_dt * draws.price_normal;
  n.z += p.sigma_z * sqrt_dt * draws.noise_normal;
  n.t += dt;
  return r;
}

inline StepResult step(const ModelParams& p, const SimState& s, const Strategy& strategy, double dt,
                       const StepDraws& draws) {
  return apply_step(p, s, strategy.quote(s.t, s.q, s.q_tilde, s.z), dt, draws);
}

inline SimState initial_state(const ModelParams& p) {
  SimState s;
  s.s = p.s0;
  return s;
}

/// One row of a recorded trajectory: the state at the start of a step, the quotes in force
/// and the fills that followed.
struct TrajectoryRecord {
  long step = 0;
  SimState state;
  StepEvents events;
};

struct PathResult {
  std::uint64_t path_index = 0;
  double objective = 0.0;
  long fills_ask = 0;
  long fills_bid = 0;
  long comp_fills_ask = 0;
  long comp_fills_bid = 0;
  long buy_arrivals = 0;
  long sell_arrivals = 0;
  bool generosity_event = false;
  long first_generosity_step = -1;
  long generosity_steps = 0;
  SimState final_state;
  std::vector<TrajectoryRecord> trajectory;
};

namespace detail {
inline void tally(PathResult& r, const StepEvents& ev, long step_index) {
  r.fills_ask += ev.ask_fill;
  r.fills_bid += ev.bid_fill;
  r.comp_fills_ask += ev.comp_ask_fill;
  r.comp_fills_bid += ev.comp_bid_fill;
  r.buy_arrivals += ev.buy_arrival;
  r.sell_arrivals += ev.sell_arrival;
  if (ev.generosity()) {
    if (!r.generosity_event) r.first_generosity_step = step_index;
    r.generosity_event = true;
    ++r.generosity_steps;
  }
}
}  // namespace detail

/// Simulates one path on a uniform grid of n_steps; deterministic in (seed, path_index).
inline PathResult run_path(const ModelParams& p, const Strategy& strategy, long n_steps,
                           std::uint64_t seed, std::uint64_t path_index = 0, bool record = false) {
  if (n_steps < 1) throw std::invalid_argument("run_path: n_steps must be >= 1");
  const TimeGrid grid(p.horizon, n_steps);
  const double dt = grid.dt();
  PathStreams streams(seed, path_index);

  PathResult r;
  r.path_index = path_index;
  if (record) r.trajectory.reserve(static_cast<std::size_t>(n_steps));
  SimState s = initial_state(p);
  for (long i = 0; i < n_steps; ++i) {
    StepResult sr = step(p, s, strategy, dt, streams.next());
    sr.state.t = grid.time(i + 1);
    detail::tally(r, sr.events, i);
    if (record) r.trajectory.push_back({i, s, sr.events});
    s = sr.state;
  }
  r.final_state = s;
  r.objective = terminal_value(p, s);
  return r;
}

struct EnvStep {
  SimState state;
  double reward = 0.0;
  bool done = false;
  StepEvents events;
};

/// Reset/step interface over the same dynamics and random streams as run_path, for driving
/// the market from an external controller.
///
/// The reward of a step is the change in cash plus inventory marked at the competitor
/// midprice, minus the running penalty; the terminal penalty is charged on the final step,
/// so rewards sum to the path objective. The increment is assembled from the spread earned
/// on fills and the price move on held inventory, which keeps it free of the cancellation
/// between cash and the full mark.
class MarketEnv {
 public:
  MarketEnv(ModelParams params, long n_steps) : params_(params), grid_(params.horizon, n_steps) {}

  const ModelParams& params() const { return params_; }
  double dt() const { return grid_.dt(); }
  long n_steps() const { return grid_.n_steps(); }
  long steps_taken() const { return steps_; }
  const SimState& state() const { return state_; }
  bool done() const { return steps_ == grid_.n_steps(); }
  /// Realized objective; meaningful once done().
  double objective() const { return terminal_value(params_, state_); }

  SimState reset(std::uint64_t seed, std::uint64_t path_index = 0) {
    streams_.emplace(seed, path_index);
    state_ = initial_state(params_);
    steps_ = 0;
    return state_;
  }

  EnvStep step(const DepthPair& action) {
    PolicyDepths quote;
    quote.depths = action;
    return step(quote);
  }

  EnvStep step(const PolicyDepths& quote) {
    if (!streams_) throw std::logic_error("MarketEnv: step before reset");
    if (done()) throw std::logic_error("MarketEnv: episode already finished");
    const SimState before = state_;
    StepResult sr = apply_step(params_, before, quote, grid_.dt(), streams_->next());
    ++steps_;
    sr.state.t = grid_.time(steps_);
    state_ = sr.state;

    EnvStep out;
    out.state = state_;
    out.events = sr.events;
    out.done = done();
    out.reward = reward(before, state_, sr.events, out.done);
    return out;
  }

 private:
  double mark_offset(const SimState& s) const {
    return 0.5 * (params_.a_tilde - params_.b_tilde) -
           params_.beta * static_cast<double>(s.q_tilde) - s.z;
  }

  double reward(const SimState& before, const SimState& after, const StepEvents& ev, bool last) const {
    const double q_old = static_cast<double>(before.q);
    const double q_new = static_cast<double>(after.q);
    double r = 0.0;
    if (ev.ask_fill) r += ev.mine.ask;
    if (ev.bid_fill) r += ev.mine.bid;
    r += q_new * (after.s - before.s);
    r += q_new * mark_offset(after) - q_old * mark_offset(before);
    r -= after.running_penalty - before.running_penalty;
    if (last) r -= params_.gamma * q_new * q_new;
    return r;
  }

  ModelParams params_;
  TimeGrid grid_;
  std::optional<PathStreams> streams_;
  SimState state_;
  long steps_ = 0;
};

}  // namespace mmcomp
