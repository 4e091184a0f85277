#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "roughmerton/kernels.hpp"
#include "roughmerton/quantization.hpp"
#include "roughmerton/time_grid.hpp"

namespace roughmerton {

/// Deterministic short rate: constant, or piecewise linear through
/// (times, values) and flat beyond the last knot.
class RateCurve {
 public:
  RateCurve(double r = 0.0);  // NOLINT: implicit from a constant rate
  RateCurve(std::vector<double> times, std::vector<double> values);

  double at(double t) const;
  bool is_constant() const noexcept { return times_.empty(); }
  double constant_value() const noexcept { return constant_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  double constant_ = 0.0;
  std::vector<double> times_;
  std::vector<double> values_;
};

struct MarketParams {
  RateCurve r{0.0};
  double theta = 0.0;     // market price of variance risk
  double rho = 0.0;       // corr(W1, B)
  double gamma_ra = 0.5;  // power-utility exponent in (0, 1)
  double T = 1.0;
  double w0 = 1.0;
  double s0 = 1.0;

  void validate() const;
};

struct VolterraHestonParams {
  double v0 = 0.04;
  double kappa = 2.0;
  double phi_mean = 0.04;
  double sigma = 0.3;
  KernelSpec kernel = KernelSpec::constant(1.0);

  void validate() const;
};

struct CirParams {
  double z0 = 0.04;
  double kappa = 2.0;
  double phi_mean = 0.04;
  double sigma = 0.3;

  void validate() const;
};

struct MarchaudParams {
  double nu0 = 0.04;
  double alpha_m = -0.75;  // in (-1, -1/2); Hurst index (alpha_m + 1)/2
  double z0 = 0.04;
  double kappa = 2.0;
  double phi_mean = 0.04;
  double sigma = 0.3;
  double floor_eps = 1e-6;

  void validate() const;
  CirParams factor() const { return {z0, kappa, phi_mean, sigma}; }
  double hurst() const noexcept { return 0.5 * (alpha_m + 1.0); }
};

struct SimulationOptions {
  std::uint64_t seed = 0;
  bool antithetic = false;
};

/// Random-number streams used by the simulators. Separate streams keep
/// Brownian drivers and fBm draws independent under one seed.
enum class Stream : std::uint64_t { Brownian = 1, Fbm = 2 };

/// Strategy pi(t_j) on the nodes of a grid. The wealth step over
/// [t_j, t_{j+1}] uses pi(t_j).
struct StrategySchedule {
  TimeGrid grid;
  std::vector<double> pi;

  static StrategySchedule constant(const TimeGrid& grid, double value);
  /// Throws if this schedule does not cover every step of `target`.
  void require_covers(const TimeGrid& target) const;
};

/// Correlated Brownian increments of one path: dW1, dW2 and
/// dB = rho dW1 + sqrt(1 - rho^2) dW2, each of length n_steps.
struct BrownianIncrements {
  std::vector<double> dw1;
  std::vector<double> dw2;
  std::vector<double> db;
};

void draw_increments(const TimeGrid& grid, double rho, const SimulationOptions& options,
                     std::uint64_t path, BrownianIncrements& out);

/// Full-truncation Euler for dZ = kappa(phi - Z)dt + sigma sqrt(Z) dB,
/// output clamped at zero. `z` has n_steps + 1 entries.
void cir_path(const CirParams& p, double dt, std::span<const double> db, std::span<double> z);

/// Paths of the Volterra Heston variance V and log stock price for one path.
struct HestonPath {
  BrownianIncrements noise;
  std::vector<double> v;
  std::vector<double> log_s;
};

/// Volterra Heston simulator using kernel-exact weights:
///   V_j = v0 + sum_{i<j} (int_{t_i}^{t_{i+1}} K(t_j - u) du / dt)
///               [kappa (phi - V_i^+) dt + sigma sqrt(V_i^+) dB_i],
/// clamped at zero, and log-Euler for the stock.
class VolterraHestonSimulator {
 public:
  VolterraHestonSimulator(VolterraHestonParams heston, MarketParams market, TimeGrid grid,
                          SimulationOptions options);

  void simulate(std::uint64_t path, HestonPath& out) const;

  const TimeGrid& grid() const noexcept { return grid_; }
  const VolterraHestonParams& heston() const noexcept { return heston_; }
  const MarketParams& market() const noexcept { return market_; }

 private:
  VolterraHestonParams heston_;
  MarketParams market_;
  TimeGrid grid_;
  SimulationOptions options_;
  std::vector<double> weights_;  // lag-indexed rect weights divided by dt
};

/// log Pi_T under strategy `pi` given the variance path and dW1 increments:
///   log Pi_{j+1} = log Pi_j + (r + theta pi V - pi^2 V / 2) dt + pi sqrt(V) dW1.
/// Writes every node to `log_wealth` when it is non-empty.
double log_wealth_path(const MarketParams& m, const TimeGrid& grid, std::span<const double> v,
                       std::span<const double> dw1, const StrategySchedule& strategy,
                       std::span<double> log_wealth = {});

/// Simulated paths with their drivers, stored row-major (path-major).
struct PathBundle {
  PathBundle(TimeGrid g, std::size_t paths, std::uint64_t s) : grid(g), n_paths(paths), seed(s) {}

  TimeGrid grid;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  std::vector<double> w1;  // n_paths x n_steps increments
  std::vector<double> w2;
  std::vector<double> v;  // n_paths x n_nodes
  std::vector<double> s;
  std::optional<std::vector<double>> wealth;
  std::optional<std::vector<double>> z;
  std::optional<std::vector<double>> y_factors;  // n_paths x n_atoms x n_nodes
  std::size_t n_factors = 0;

  std::span<const double> path_row(const std::vector<double>& data, std::size_t path,
                                   std::size_t width) const {
    return {data.data() + path * width, width};
  }
};

PathBundle simulate_volterra_heston(const VolterraHestonParams& h, const MarketParams& m,
                                    const TimeGrid& grid, std::size_t n_paths,
                                    const SimulationOptions& options);

/// Adds wealth paths to a bundle that carries v and w1.
void simulate_wealth(PathBundle& bundle, const MarketParams& m, const StrategySchedule& strategy);

/// Per-path terminal utility (Pi_T)^gamma / gamma for each strategy, every
/// strategy driven by the same simulated paths. Result is indexed
/// [strategy][path].
std::vector<std::vector<double>> utility_samples(const VolterraHestonSimulator& sim,
                                                 const std::vector<StrategySchedule>& strategies,
                                                 std::size_t n_paths);

/// Per-path exp(a int_0^T V dt), trapezoid in t.
std::vector<double> exp_integral_samples(const VolterraHestonSimulator& sim, double a,
                                         std::size_t n_paths);

/// V at the given node indices, n_paths x nodes.size().
std::vector<double> variance_samples(const VolterraHestonSimulator& sim,
                                     const std::vector<std::size_t>& nodes, std::size_t n_paths);

/// n_paths x n_nodes matrix of CIR paths driven by independent dB.
std::vector<double> simulate_cir(const CirParams& p, const TimeGrid& grid, std::size_t n_paths,
                                 const SimulationOptions& options);

/// Exact fractional Brownian motion on a grid by Cholesky factorisation of
/// the covariance (t^2H + s^2H - |t-s|^2H)/2 at the nodes t_1..t_n.
class FbmGenerator {
 public:
  static constexpr std::size_t kMaxSteps = 4096;

  FbmGenerator(double hurst, TimeGrid grid);

  /// Writes W^H at all n_steps + 1 nodes; W^H_0 = 0.
  void sample(std::uint64_t seed, std::uint64_t path, std::span<double> out) const;
  double hurst() const noexcept { return hurst_; }
  const TimeGrid& grid() const noexcept { return grid_; }

 private:
  double hurst_;
  TimeGrid grid_;
  std::vector<double> lower_;  // packed row-major lower-triangular factor
};

/// n_paths x n_nodes fBm paths.
std::vector<double> simulate_fbm(double hurst, const TimeGrid& grid, std::size_t n_paths,
                                 std::uint64_t seed);

/// h(t) = (1 - exp(-t x)) / x, with h -> t as x -> 0.
double factor_loading(double x, double t);

/// Y^x factor recursion for one atom given a Z path on the grid, solving
/// dY = h(t) dZ - x Y dt exactly for Z linear between nodes. Y_0 = 0.
void y_factor_path(double x, const TimeGrid& grid, std::span<const double> z,
                   std::span<double> y);

/// Z paths and the Y^{x_i} factor paths for every atom of `q`, driven by
/// dB = rho dW1 + sqrt(1 - rho^2) dW2. Returned in a bundle with z and
/// y_factors set (v and s left empty).
PathBundle simulate_marchaud_factors(const MarchaudParams& p, const Quantization& q, double rho,
                                     const TimeGrid& grid, std::size_t n_paths,
                                     const SimulationOptions& options);

}  // namespace roughmerton
