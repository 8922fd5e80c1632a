#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mmcomp/closed_form.hpp"
#include "mmcomp/model.hpp"
#include "mmcomp/sim.hpp"
#include "mmcomp/stats.hpp"

namespace mmcomp {

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers (0 = hardware concurrency).
/// Work is split into contiguous blocks; results must be written to per-index slots.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t block = (n + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t lo = w * block;
    const std::size_t hi = std::min(n, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct MonteCarloSpec {
  long n_paths = 10000;
  long n_steps = 1000;
  std::uint64_t seed = 7;
  unsigned threads = 0;
};

/// Path i always uses random substream (seed, i), whichever strategy is being run.
inline std::vector<PathResult> run_paths(const ModelParams& p, const Strategy& strategy,
                                         const MonteCarloSpec& spec) {
  if (spec.n_paths < 1) throw std::invalid_argument("run_paths: n_paths must be >= 1");
  std::vector<PathResult> out(static_cast<std::size_t>(spec.n_paths));
  parallel_for(out.size(), spec.threads, [&](std::size_t i) {
    out[i] = run_path(p, strategy, spec.n_steps, spec.seed, static_cast<std::uint64_t>(i));
  });
  return out;
}

inline std::vector<double> objectives(const std::vector<PathResult>& paths) {
  std::vector<double> v;
  v.reserve(paths.size());
  for (const auto& r : paths) v.push_back(r.objective);
  return v;
}

// ---------------------------------------------------------------------------
// Comparative statics

struct StaticsRow {
  double t = 0.0;
  std::int64_t q_tilde = 0;
  int q = 0;
  DepthPair hat;
  DepthPair competitor;
  bool ask_truncated = false;  ///< hat ask below the competitor ask
  bool bid_truncated = false;
};

namespace detail {
inline StaticsRow statics_row(const ModelParams& p, const OmegaTable& omega, double t, int q,
                              std::int64_t q_tilde, double z) {
  StaticsRow row;
  row.t = t;
  row.q_tilde = q_tilde;
  row.q = q;
  row.hat = hat_depths(p, omega, t, q, q_tilde, z);
  row.competitor = competitor_depths(p, q_tilde, z);
  row.ask_truncated = row.hat.ask_posted && row.hat.ask < row.competitor.ask;
  row.bid_truncated = row.hat.bid_posted && row.hat.bid < row.competitor.bid;
  return row;
}
}  // namespace detail

/// Unrestrained depths at a fixed time over a competitor-inventory range, for every q.
inline std::vector<StaticsRow> statics_depth_surface(const ModelParams& p, const OmegaTable& omega,
                                                     double t_fixed, std::int64_t q_tilde_lo,
                                                     std::int64_t q_tilde_hi, double z = 0.0) {
  if (q_tilde_hi < q_tilde_lo) throw std::invalid_argument("statics: empty q_tilde range");
  std::vector<StaticsRow> rows;
  for (std::int64_t qt = q_tilde_lo; qt <= q_tilde_hi; ++qt)
    for (int q = p.q_min; q <= p.q_max; ++q) rows.push_back(detail::statics_row(p, omega, t_fixed, q, qt, z));
  return rows;
}

/// Unrestrained depths on every node of the omega time grid, for every q.
inline std::vector<StaticsRow> statics_time_surface(const ModelParams& p, const OmegaTable& omega,
                                                    std::int64_t q_tilde = 0, double z = 0.0,
                                                    long every = 1) {
  if (every < 1) throw std::invalid_argument("statics: time stride must be >= 1");
  const TimeGrid& grid = omega.time_grid();
  std::vector<StaticsRow> rows;
  for (long i = 0; i <= grid.n_steps(); i += every)
    for (int q = p.q_min; q <= p.q_max; ++q)
      rows.push_back(detail::statics_row(p, omega, grid.time(i), q, q_tilde, z));
  return rows;
}

// ---------------------------------------------------------------------------
// Strategy comparison under common random numbers

struct StrategyStats {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double generosity_rate = 0.0;
  double mean_fills_ask = 0.0;
  double mean_fills_bid = 0.0;
};

struct ComparisonReport {
  std::vector<StrategyStats> strategies;
  long n_paths = 0;
  long n_steps = 0;
  std::uint64_t seed = 0;
  double confidence = 0.99;
  /// Paired test on (second - first).
  stats::PairedTTest paired;
  bool significant = false;
  /// Per-path objectives, one vector per strategy (same order).
  std::vector<std::vector<double>> path_objectives;
};

inline StrategyStats summarize_strategy(const std::string& name, const std::vector<PathResult>& paths) {
  StrategyStats s;
  s.name = name;
  const auto obj = objectives(paths);
  const auto sum = stats::summarize(obj);
  s.mean = sum.mean;
  s.sd = sum.sd;
  long events = 0;
  stats::CompensatedSum fa, fb;
  for (const auto& r : paths) {
    events += r.generosity_event;
    fa.add(static_cast<double>(r.fills_ask));
    fb.add(static_cast<double>(r.fills_bid));
  }
  const double n = static_cast<double>(paths.size());
  s.generosity_rate = static_cast<double>(events) / n;
  s.mean_fills_ask = fa.value() / n;
  s.mean_fills_bid = fb.value() / n;
  return s;
}

inline ComparisonReport run_comparison(const ModelParams& p, const std::vector<Strategy>& strategies,
                                       const MonteCarloSpec& spec, double confidence = 0.99) {
  if (strategies.size() < 2) throw std::invalid_argument("run_comparison: need at least 2 strategies");
  if (spec.n_paths < 2) throw std::invalid_argument("run_comparison: need at least 2 paths");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("run_comparison: confidence must be in (0, 1)");

  ComparisonReport rep;
  rep.n_paths = spec.n_paths;
  rep.n_steps = spec.n_steps;
  rep.seed = spec.seed;
  rep.confidence = confidence;
  for (const auto& st : strategies) {
    const auto paths = run_paths(p, st, spec);
    rep.strategies.push_back(summarize_strategy(st.name, paths));
    rep.path_objectives.push_back(objectives(paths));
  }
  rep.paired = stats::paired_t_test(rep.path_objectives[0], rep.path_objectives[1]);
  rep.significant = rep.paired.p_value < 1.0 - confidence;
  return rep;
}

// ---------------------------------------------------------------------------
// Generosity census

/// A flagged path's trajectory trimmed to the first flagged step +- margin.
struct GenerosityWindow {
  std::uint64_t path_index = 0;
  long first_step = 0;
  long begin = 0;  ///< first recorded step (inclusive)
  long end = 0;    ///< one past the last recorded step
  std::vector<TrajectoryRecord> records;
};

struct CensusResult {
  long n_paths = 0;
  long n_events = 0;
  double rate = 0.0;
  std::vector<std::uint64_t> flagged_paths;
  std::vector<GenerosityWindow> windows;
};

inline CensusResult generosity_census(const ModelParams& p, const Strategy& strategy,
                                      const MonteCarloSpec& spec, std::size_t max_windows = 0,
                                      long margin = 50) {
  const auto paths = run_paths(p, strategy, spec);
  CensusResult c;
  c.n_paths = spec.n_paths;
  for (const auto& r : paths)
    if (r.generosity_event) {
      ++c.n_events;
      c.flagged_paths.push_back(r.path_index);
    }
  c.rate = static_cast<double>(c.n_events) / static_cast<double>(c.n_paths);

  // Flagged paths are replayed with recording on; determinism makes the replay identical.
  for (std::size_t k = 0; k < std::min(max_windows, c.flagged_paths.size()); ++k) {
    const auto idx = c.flagged_paths[k];
    const auto full = run_path(p, strategy, spec.n_steps, spec.seed, idx, true);
    GenerosityWindow w;
    w.path_index = idx;
    w.first_step = full.first_generosity_step;
    w.begin = std::max(0L, w.first_step - margin);
    w.end = std::min(spec.n_steps, w.first_step + margin + 1);
    w.records.assign(full.trajectory.begin() + w.begin, full.trajectory.begin() + w.end);
    c.windows.push_back(std::move(w));
  }
  return c;
}

}  // namespace mmcomp
