#pragma once

#include <cstddef>
#include <vector>

#include "roughmerton/kernels.hpp"
#include "roughmerton/time_grid.hpp"

namespace roughmerton {

struct VolterraHestonParams;

/// Right-hand side c0 + c1 f + c2 f^2 of the Riccati-Volterra equation
/// f = K * (c0 + c1 f + c2 f^2).
struct RiccatiCoefficients {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  double operator()(double f) const noexcept { return c0 + f * (c1 + c2 * f); }
};

struct RiccatiSolution {
  TimeGrid grid;
  std::vector<double> values;  // values[0] == 0
  RiccatiCoefficients coeffs;
  KernelSpec kernel;
  std::size_t corrector_iters;

  /// Linear interpolation between nodes, clamped to [0, horizon].
  double at(double t) const;
};

struct RiccatiOptions {
  std::size_t corrector_iters = 2;
  double blow_up_cap = 1e8;
};

/// Fractional Adams-type predictor-corrector with kernel-exact weights:
/// a rectangle-rule predictor followed by `corrector_iters` sweeps of the
/// product trapezoid rule. Throws BlowUpError once |f| exceeds the cap.
RiccatiSolution solve_riccati(const KernelSpec& kernel, const RiccatiCoefficients& coeffs,
                              const TimeGrid& grid, const RiccatiOptions& options = {});

/// max_j |f_j - convolve_grid(K, c0 + c1 f + c2 f^2)_j|.
double riccati_residual(const RiccatiSolution& solution);

/// 10 dt^min(alpha, 1).
double riccati_tolerance(const KernelSpec& kernel, double dt);

/// kappa^2 - 2 a sigma^2 > 0 (strict).
bool check_global_existence(double kappa, double sigma, double a);

/// E[exp(a int_0^T V_u du)] for the Volterra Heston variance, via
/// exp(V0 int_0^T F(g) du + kappa phi int_0^T g du) with F(g) = a - kappa g
/// + sigma^2 g^2 / 2 and g the Riccati-Volterra solution on `grid`.
/// Unless `allow_local` is set, the global existence condition is required.
double exponential_moment(const VolterraHestonParams& heston, double a, const TimeGrid& grid,
                          bool allow_local = false);

/// Trapezoid rule over a grid.
double trapezoid(const std::vector<double>& values, double dt);

}  // namespace roughmerton
