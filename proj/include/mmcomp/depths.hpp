#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "mmcomp/model.hpp"
#include "mmcomp/value_table.hpp"

namespace mmcomp {

/// Unrestrained optimal depths from a value surface g:
///   ask = beta/2 + 1/kappa + g(t,q) - g(t,q-1) - beta*q_tilde - z
///   bid = beta/2 + 1/kappa + g(t,q) - g(t,q+1) + beta*q_tilde + z
/// A side at its inventory bound is returned as not posted.
template <ValueSurface Surface>
DepthPair hat_depths(const ModelParams& p, const Surface& surface, double t, int q,
                     std::int64_t q_tilde, double z) {
  if (q < surface.q_min() || q > surface.q_max())
    throw std::out_of_range("hat_depths: inventory q=" + std::to_string(q) + " outside [" +
                            std::to_string(surface.q_min()) + ", " +
                            std::to_string(surface.q_max()) + "]");
  const double shift = p.beta * static_cast<double>(q_tilde) + z;
  const double base = 0.5 * p.beta + 1.0 / p.kappa;

  DepthPair d;
  d.ask_posted = q > surface.q_min();
  d.bid_posted = q < surface.q_max();
  const double gq = surface.g(t, q);
  if (d.ask_posted) d.ask = base + (gq - surface.g(t, q - 1)) - shift;
  if (d.bid_posted) d.bid = base + (gq - surface.g(t, q + 1)) + shift;
  return d;
}

/// Unrestrained depths floored at the competitor's one-tick-better depths.
template <ValueSurface Surface>
PolicyDepths truncated_depths(const ModelParams& p, const Surface& surface, double t, int q,
                              std::int64_t q_tilde, double z) {
  const DepthPair hat = hat_depths(p, surface, t, q, q_tilde, z);
  const DepthPair comp = competitor_depths(p, q_tilde, z);

  PolicyDepths out;
  out.depths = hat;
  if (hat.ask_posted && hat.ask < comp.ask) {
    out.depths.ask = comp.ask;
    out.ask_truncated = true;
  }
  if (hat.bid_posted && hat.bid < comp.bid) {
    out.depths.bid = comp.bid;
    out.bid_truncated = true;
  }
  return out;
}

}  // namespace mmcomp
