#include "roughmerton/time_grid.hpp"

#include <cmath>
#include <string>

#include "roughmerton/errors.hpp"

namespace roughmerton {

TimeGrid::TimeGrid(double dt, std::size_t n_steps) : dt_(dt), n_steps_(n_steps) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw DomainError("time grid step must be positive and finite");
  }
  if (n_steps < 1) {
    throw DomainError("time grid needs at least one step");
  }
}

TimeGrid TimeGrid::over(double horizon, double dt_target) {
  if (!(horizon > 0.0) || !(dt_target > 0.0)) {
    throw DomainError("horizon and step must be positive");
  }
  const double steps = std::max(1.0, std::round(horizon / dt_target));
  return with_steps(horizon, static_cast<std::size_t>(steps));
}

TimeGrid TimeGrid::with_steps(double horizon, std::size_t n_steps) {
  if (!(horizon > 0.0)) {
    throw DomainError("horizon must be positive");
  }
  if (n_steps < 1) {
    throw DomainError("time grid needs at least one step");
  }
  return TimeGrid(horizon / static_cast<double>(n_steps), n_steps);
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> t(n_nodes());
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = node(j);
  return t;
}

}  // namespace roughmerton
