#include "roughmerton/riccati.hpp"

#include <cmath>
#include <string>

#include "roughmerton/errors.hpp"
#include "roughmerton/models.hpp"

namespace roughmerton {

double RiccatiSolution::at(double t) const {
  const double dt = grid.dt();
  if (t <= 0.0) return values.front();
  if (t >= grid.horizon()) return values.back();
  const double pos = t / dt;
  const auto j = static_cast<std::size_t>(pos);
  if (j + 1 >= values.size()) return values.back();
  const double w = pos - static_cast<double>(j);
  return (1.0 - w) * values[j] + w * values[j + 1];
}

RiccatiSolution solve_riccati(const KernelSpec& kernel, const RiccatiCoefficients& coeffs,
                              const TimeGrid& grid, const RiccatiOptions& options) {
  if (!std::isfinite(coeffs.c0) || !std::isfinite(coeffs.c1) || !std::isfinite(coeffs.c2)) {
    throw DomainError("Riccati coefficients must be finite");
  }
  const ConvolutionWeights w(kernel, grid);
  const std::size_t n = grid.n_nodes();
  std::vector<double> f(n, 0.0);
  std::vector<double> rhs(n, 0.0);
  rhs[0] = coeffs(0.0);
  const double last_cell = w.rect[1] - w.lin[1];

  for (std::size_t j = 1; j < n; ++j) {
    double predictor = 0.0;
    double history = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
      const std::size_t lag = j - i;
      predictor += w.rect[lag] * rhs[i];
      history += w.lin[lag] * rhs[i];
      if (i + 1 < j) history += (w.rect[lag] - w.lin[lag]) * rhs[i + 1];
    }
    double fj = predictor;
    for (std::size_t k = 0; k < options.corrector_iters; ++k) {
      fj = history + last_cell * coeffs(fj);
    }
    if (!std::isfinite(fj) || std::abs(fj) > options.blow_up_cap) {
      throw BlowUpError("Riccati-Volterra solution exploded after t = " +
                            std::to_string(grid.node(j - 1)),
                        j - 1);
    }
    f[j] = fj;
    rhs[j] = coeffs(fj);
  }
  return RiccatiSolution{grid, std::move(f), coeffs, kernel, options.corrector_iters};
}

double riccati_residual(const RiccatiSolution& solution) {
  std::vector<double> rhs(solution.values.size());
  for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] = solution.coeffs(solution.values[j]);
  const auto conv = convolve_grid(solution.kernel, rhs, solution.grid);
  double worst = 0.0;
  for (std::size_t j = 0; j < conv.size(); ++j) {
    worst = std::max(worst, std::abs(solution.values[j] - conv[j]));
  }
  return worst;
}

double riccati_tolerance(const KernelSpec& kernel, double dt) {
  return 10.0 * std::pow(dt, std::min(kernel.canonical().alpha(), 1.0));
}

bool check_global_existence(double kappa, double sigma, double a) {
  return kappa * kappa - 2.0 * a * sigma * sigma > 0.0;
}

double trapezoid(const std::vector<double>& values, double dt) {
  if (values.size() < 2) return 0.0;
  double acc = 0.5 * (values.front() + values.back());
  for (std::size_t j = 1; j + 1 < values.size(); ++j) acc += values[j];
  return acc * dt;
}

double exponential_moment(const VolterraHestonParams& heston, double a, const TimeGrid& grid,
                          bool allow_local) {
  if (!allow_local && !check_global_existence(heston.kappa, heston.sigma, a)) {
    throw DomainError("kappa^2 - 2 a sigma^2 > 0 fails; pass allow_local to solve anyway");
  }
  const RiccatiCoefficients coeffs{a, -heston.kappa, 0.5 * heston.sigma * heston.sigma};
  const RiccatiSolution g = solve_riccati(heston.kernel, coeffs, grid);
  std::vector<double> rhs(g.values.size());
  for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] = coeffs(g.values[j]);
  const double exponent = heston.v0 * trapezoid(rhs, grid.dt()) +
                          heston.kappa * heston.phi_mean * trapezoid(g.values, grid.dt());
  return std::exp(exponent);
}

}  // namespace roughmerton
