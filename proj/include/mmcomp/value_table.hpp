#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mmcomp {

/// Uniform grid t_i = i * horizon / n_steps, i = 0..n_steps.
class TimeGrid {
 public:
  TimeGrid(double horizon, long n_steps) : horizon_(horizon), n_steps_(n_steps) {
    if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be > 0");
    if (n_steps < 1) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
  }

  double horizon() const { return horizon_; }
  long n_steps() const { return n_steps_; }
  long n_points() const { return n_steps_ + 1; }
  double dt() const { return horizon_ / static_cast<double>(n_steps_); }
  double time(long i) const {
    return i == n_steps_ ? horizon_ : horizon_ * static_cast<double>(i) / static_cast<double>(n_steps_);
  }

  /// Cell index and weight of the upper node for linear interpolation. Times that sit on
  /// a node (up to rounding) return weight 0 so grid-aligned queries are exact.
  std::pair<long, double> locate(double t) const {
    if (!(t >= 0.0) || t > horizon_ * (1.0 + 1e-12))
      throw std::out_of_range("TimeGrid: t=" + std::to_string(t) + " outside [0, horizon]");
    const double pos = t / horizon_ * static_cast<double>(n_steps_);
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) <= 1e-9 * std::max(1.0, pos)) {
      const long i = static_cast<long>(nearest);
      return {std::min(i, n_steps_), 0.0};
    }
    const long i = std::min(static_cast<long>(std::floor(pos)), n_steps_ - 1);
    return {i, pos - static_cast<double>(i)};
  }

  bool operator==(const TimeGrid&) const = default;

 private:
  double horizon_;
  long n_steps_;
};

/// g(t, q) tabulated on TimeGrid x {q_min..q_max}, row-major in time.
class GTable {
 public:
  GTable(TimeGrid grid, int q_min, int q_max)
      : grid_(grid),
        q_min_(q_min),
        q_max_(q_max),
        values_(static_cast<std::size_t>(grid.n_points()) * static_cast<std::size_t>(q_max - q_min + 1)) {
    if (q_max < q_min) throw std::invalid_argument("GTable: empty inventory range");
  }

  const TimeGrid& grid() const { return grid_; }
  int q_min() const { return q_min_; }
  int q_max() const { return q_max_; }
  int n_inventory() const { return q_max_ - q_min_ + 1; }

  double& at(long i, int q) { return values_[offset(i, q)]; }
  double at(long i, int q) const { return values_[offset(i, q)]; }

  /// Linear interpolation in t; q must be on the grid.
  double value(double t, int q) const {
    const auto [i, w] = grid_.locate(t);
    if (w == 0.0) return at(i, q);
    return (1.0 - w) * at(i, q) + w * at(i + 1, q);
  }

  const std::vector<double>& raw() const { return values_; }

 private:
  std::size_t offset(long i, int q) const {
    if (q < q_min_ || q > q_max_)
      throw std::out_of_range("inventory q=" + std::to_string(q) + " outside [" +
                              std::to_string(q_min_) + ", " + std::to_string(q_max_) + "]");
    if (i < 0 || i > grid_.n_steps()) throw std::out_of_range("time index out of range");
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_inventory()) +
           static_cast<std::size_t>(q - q_min_);
  }

  TimeGrid grid_;
  int q_min_;
  int q_max_;
  std::vector<double> values_;
};

/// Anything that answers g(t, q) over an inventory range.
template <class T>
concept ValueSurface = requires(const T& s, double t, int q) {
  { s.g(t, q) } -> std::convertible_to<double>;
  { s.q_min() } -> std::convertible_to<int>;
  { s.q_max() } -> std::convertible_to<int>;
};

}  // namespace mmcomp
