#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "roughmerton/models.hpp"
#include "roughmerton/quantization.hpp"

namespace roughmerton {

enum class Spacing { Geometric, Linear };

std::string to_string(Spacing s);
Spacing spacing_from_string(const std::string& name);

struct PartitionSpec {
  double xi_min = 1e-4;
  double xi_max = 1e4;
  std::size_t n = 50;
  Spacing spacing = Spacing::Geometric;

  std::vector<double> knots() const;
};

/// x^(alpha+1) / (Gamma(-alpha) Gamma(alpha+1)).
double mu_tilde_density(double alpha_m, double x);

/// Cell masses and barycentres of the mixing density in closed form.
Quantization build_quantization(double alpha_m, const PartitionSpec& spec);
Quantization build_quantization(double alpha_m, std::vector<double> knots);

struct LaplaceCheck {
  double discrete = 0.0;
  double exact = 0.0;
  double abs_err = 0.0;
};

/// sum q_i exp(-t x_i) against (alpha+1)/Gamma(-alpha) t^(-alpha-2).
LaplaceCheck laplace_check(const Quantization& q, double t);

/// True when every knot of `coarse` is a knot of `fine` (relative 1e-12).
bool is_nested(const std::vector<double>& coarse, const std::vector<double>& fine);

struct ApproxVolPaths {
  std::vector<double> nu;        // n_paths x n_nodes
  std::vector<double> variance;  // a(nu) = max(nu, floor_eps)
};

/// nu_t = nu0 + Z_t t^(-alpha-1)/Gamma(-alpha) + sum_i q_i Y^{x_i}_t for t > 0.
/// The t = 0 node repeats the t_1 value, so the first integration cell sees
/// nu(t_1). z_paths is n_paths x n_nodes, y_paths n_paths x n_atoms x n_nodes.
ApproxVolPaths assemble_approx_vol(const MarchaudParams& p, const Quantization& q,
                                   std::span<const double> z_paths,
                                   std::span<const double> y_paths, const TimeGrid& grid);

struct ApproxValue {
  std::size_t n = 0;
  double estimate = 0.0;
  double std_err = 0.0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
};

/// Per-path values (w0^g/g) exp(int_0^T g r + g theta^2 a(nu^n)/(2(1-g)) dt),
/// trapezoid in t. Requires rho = 0.
std::vector<double> feynman_kac_samples(const MarchaudParams& p, const MarketParams& m,
                                        const Quantization& q, const TimeGrid& grid,
                                        std::size_t n_paths, const SimulationOptions& options);

ApproxValue feynman_kac_value(const MarchaudParams& p, const MarketParams& m,
                              const Quantization& q, const TimeGrid& grid, std::size_t n_paths,
                              const SimulationOptions& options);

struct ConvergenceRow {
  ApproxValue value;
  double diff = 0.0;          // estimate minus the previous row's estimate
  double combined_se = 0.0;   // sqrt(se_prev^2 + se^2)
  double paired_se = 0.0;     // standard error of the per-path difference
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  bool nondecreasing = false;  // every diff >= -combined_se
  bool stabilizing = false;    // |last diff| < 2 combined_se
};

/// Values for each partition in `specs` under common random numbers. Each
/// partition must refine the previous one.
ConvergenceTable convergence_study(const MarchaudParams& p, const MarketParams& m,
                                   const std::vector<PartitionSpec>& specs, const TimeGrid& grid,
                                   std::size_t n_paths, const SimulationOptions& options);

/// Constant schedule theta/(1-gamma). Requires rho = 0.
StrategySchedule optimal_strategy_rho0(const MarketParams& m, const TimeGrid& grid);

/// Classical Heston value through the Markovian Feynman-Kac route:
///   (w0^g/g) exp(g int r) E~[exp(g theta^2/(2 delta (1-g)) int_0^T V)]^delta,
/// with V a CIR process under the tilted measure (mean reversion lambda,
/// level kappa phi / lambda) simulated by full-truncation Euler. The
/// standard error uses the delta method.
ApproxValue heston_feynman_kac_value(const VolterraHestonParams& h, const MarketParams& m,
                                     const TimeGrid& grid, std::size_t n_paths,
                                     const SimulationOptions& options);

}  // namespace roughmerton
