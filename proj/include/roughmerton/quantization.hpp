#pragma once

#include <cstddef>
#include <vector>

namespace roughmerton {

/// Finite-atom approximation of the Marchaud mixing measure: cell i spans
/// (partition[i], partition[i+1]) and carries an atom at its barycentre
/// atoms[i] with mass masses[i].
struct Quantization {
  double alpha_m = 0.0;
  std::vector<double> partition;
  std::vector<double> atoms;
  std::vector<double> masses;

  std::size_t n() const noexcept { return atoms.size(); }
};

}  // namespace roughmerton
