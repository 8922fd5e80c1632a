#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "mmcomp/closed_form.hpp"
#include "mmcomp/hjb_euler.hpp"
#include "mmcomp/model.hpp"

namespace mmcomp {

/// (t, q, q_tilde, z) -> quote. Must not post a side suppressed by the inventory bounds.
using StrategyFn = std::function<PolicyDepths(double t, int q, std::int64_t q_tilde, double z)>;

struct Strategy {
  std::string name;
  StrategyFn quote;
};

inline Strategy closed_form_strategy(const ModelParams& p, std::shared_ptr<const OmegaTable> omega) {
  if (!omega) throw std::invalid_argument("closed_form_strategy: null omega table");
  return {"closed-form", [p, omega = std::move(omega)](double t, int q, std::int64_t qt, double z) {
            return closed_form_depths(p, *omega, t, q, qt, z);
          }};
}

inline Strategy euler_strategy(const ModelParams& p, std::shared_ptr<const ValueGrid> grid) {
  if (!grid) throw std::invalid_argument("euler_strategy: null value grid");
  return {"euler", [p, grid = std::move(grid)](double t, int q, std::int64_t qt, double z) {
            return euler_policy(p, *grid, t, q, qt, z);
          }};
}

/// Fixed depths on both sides, suppressed at the inventory bounds.
inline Strategy constant_strategy(const ModelParams& p, double ask, double bid) {
  return {"constant:" + std::to_string(ask) + ":" + std::to_string(bid),
          [p, ask, bid](double, int q, std::int64_t, double) {
            PolicyDepths out;
            out.depths = DepthPair{ask, bid, q > p.q_min, q < p.q_max};
            return out;
          }};
}

/// Quotes exactly at the competitor's one-tick-better depths. Never flagged as truncated:
/// there is no unrestrained depth being floored.
inline Strategy competitor_matching_strategy(const ModelParams& p) {
  return {"match-competitor", [p](double, int q, std::int64_t qt, double z) {
            PolicyDepths out;
            out.depths = competitor_depths(p, qt, z);
            out.depths.ask_posted = q > p.q_min;
            out.depths.bid_posted = q < p.q_max;
            return out;
          }};
}

}  // namespace mmcomp
