#pragma once

#include <cstddef>
#include <vector>

namespace roughmerton {

/// Uniform grid t_j = j * dt, j = 0..n_steps.
class TimeGrid {
 public:
  TimeGrid(double dt, std::size_t n_steps);

  /// Grid on [0, horizon] with the step closest to `dt_target` that divides
  /// the horizon exactly.
  static TimeGrid over(double horizon, double dt_target);
  static TimeGrid with_steps(double horizon, std::size_t n_steps);

  double dt() const noexcept { return dt_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  std::size_t n_nodes() const noexcept { return n_steps_ + 1; }
  double horizon() const noexcept { return dt_ * static_cast<double>(n_steps_); }
  double node(std::size_t j) const noexcept { return dt_ * static_cast<double>(j); }
  std::vector<double> nodes() const;

  bool operator==(const TimeGrid&) const = default;

 private:
  double dt_;
  std::size_t n_steps_;
};

}  // namespace roughmerton
