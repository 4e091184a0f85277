#include "roughmerton/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "roughmerton/errors.hpp"
#include "roughmerton/parallel.hpp"
#include "roughmerton/riccati.hpp"
#include "roughmerton/rng.hpp"

namespace roughmerton {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw DomainError(message);
}

bool finite(double x) { return std::isfinite(x); }

// (z - 1 + e^{-z}) / z^2, finite as z -> 0.
double phi2(double z) {
  if (z < 1e-3) return 0.5 - z / 6.0 + z * z / 24.0;
  return (z + std::expm1(-z)) / (z * z);
}

}  // namespace

RateCurve::RateCurve(double r) : constant_(r) {
  require(finite(r), "interest rate must be finite");
}

RateCurve::RateCurve(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  require(!times_.empty() && times_.size() == values_.size(),
          "rate curve needs matching, non-empty times and values");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    require(finite(times_[i]) && finite(values_[i]), "rate curve entries must be finite");
    if (i > 0) require(times_[i] > times_[i - 1], "rate curve times must increase strictly");
  }
  constant_ = values_.front();
}

double RateCurve::at(double t) const {
  if (times_.empty()) return constant_;
  if (t <= times_.front()) return values_.front();
  if (t >= times_.back()) return values_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  return (1.0 - w) * values_[lo] + w * values_[hi];
}

void MarketParams::validate() const {
  require(finite(theta), "theta must be finite");
  require(rho > -1.0 && rho < 1.0, "rho must lie in (-1, 1)");
  require(gamma_ra > 0.0 && gamma_ra < 1.0, "risk aversion gamma must lie in (0, 1)");
  require(T > 0.0 && finite(T), "horizon T must be positive");
  require(w0 > 0.0 && finite(w0), "initial wealth must be positive");
  require(s0 > 0.0 && finite(s0), "initial stock price must be positive");
}

void VolterraHestonParams::validate() const {
  require(v0 >= 0.0 && finite(v0), "v0 must be non-negative");
  require(kappa > 0.0 && finite(kappa), "kappa must be positive");
  require(phi_mean >= 0.0 && finite(phi_mean), "phi must be non-negative");
  require(sigma >= 0.0 && finite(sigma), "sigma must be non-negative");
  require(kernel.l2_ok(), "Volterra Heston kernel must be locally square integrable");
}

void CirParams::validate() const {
  require(z0 >= 0.0 && finite(z0), "z0 must be non-negative");
  require(kappa > 0.0 && finite(kappa), "kappa must be positive");
  require(phi_mean >= 0.0 && finite(phi_mean), "phi must be non-negative");
  require(sigma >= 0.0 && finite(sigma), "sigma must be non-negative");
}

void MarchaudParams::validate() const {
  require(alpha_m > -1.0 && alpha_m < -0.5, "alpha_m must lie strictly inside (-1, -1/2)");
  require(finite(nu0), "nu0 must be finite");
  require(floor_eps > 0.0 && finite(floor_eps), "floor_eps must be positive");
  factor().validate();
}

StrategySchedule StrategySchedule::constant(const TimeGrid& grid, double value) {
  return {grid, std::vector<double>(grid.n_nodes(), value)};
}

void StrategySchedule::require_covers(const TimeGrid& target) const {
  const double rel = std::abs(grid.dt() - target.dt()) / target.dt();
  if (rel > 1e-12 || pi.size() < target.n_steps() || grid.n_steps() < target.n_steps() ||
      pi.size() < grid.n_nodes()) {
    throw DomainError("strategy schedule does not cover the simulation grid");
  }
}

void draw_increments(const TimeGrid& grid, double rho, const SimulationOptions& options,
                     std::uint64_t path, BrownianIncrements& out) {
  const std::size_t n = grid.n_steps();
  out.dw1.resize(n);
  out.dw2.resize(n);
  out.db.resize(n);
  NormalSource normal(options.seed, path, static_cast<std::uint64_t>(Stream::Brownian),
                      options.antithetic);
  const double sqdt = std::sqrt(grid.dt());
  const double rho_bar = std::sqrt(1.0 - rho * rho);
  for (std::size_t k = 0; k < n; ++k) {
    out.dw1[k] = sqdt * normal();
    out.dw2[k] = sqdt * normal();
    out.db[k] = rho * out.dw1[k] + rho_bar * out.dw2[k];
  }
}

void cir_path(const CirParams& p, double dt, std::span<const double> db, std::span<double> z) {
  if (z.size() != db.size() + 1) throw DomainError("CIR path length mismatch");
  z[0] = p.z0;
  for (std::size_t k = 0; k < db.size(); ++k) {
    const double zp = std::max(z[k], 0.0);
    z[k + 1] = z[k] + p.kappa * (p.phi_mean - zp) * dt + p.sigma * std::sqrt(zp) * db[k];
  }
  for (double& value : z) value = std::max(value, 0.0);
}

VolterraHestonSimulator::VolterraHestonSimulator(VolterraHestonParams heston, MarketParams market,
                                                 TimeGrid grid, SimulationOptions options)
    : heston_(std::move(heston)),
      market_(std::move(market)),
      grid_(grid),
      options_(options),
      weights_(grid.n_nodes(), 0.0) {
  heston_.validate();
  market_.validate();
  const ConvolutionWeights w(heston_.kernel, grid_);
  for (std::size_t lag = 1; lag < weights_.size(); ++lag) weights_[lag] = w.rect[lag] / grid_.dt();
}

void VolterraHestonSimulator::simulate(std::uint64_t path, HestonPath& out) const {
  draw_increments(grid_, market_.rho, options_, path, out.noise);
  const std::size_t n = grid_.n_nodes();
  const double dt = grid_.dt();
  out.v.assign(n, 0.0);
  out.log_s.assign(n, 0.0);
  std::vector<double> increment(n, 0.0);
  const auto& h = heston_;
  out.v[0] = h.v0;
  out.log_s[0] = std::log(market_.s0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double vp = std::max(out.v[j], 0.0);
    increment[j] = h.kappa * (h.phi_mean - vp) * dt + h.sigma * std::sqrt(vp) * out.noise.db[j];
    double acc = h.v0;
    for (std::size_t i = 0; i <= j; ++i) acc += weights_[j + 1 - i] * increment[i];
    out.v[j + 1] = std::max(acc, 0.0);
    const double r = market_.r.at(grid_.node(j));
    out.log_s[j + 1] = out.log_s[j] + (r + market_.theta * vp - 0.5 * vp) * dt +
                       std::sqrt(vp) * out.noise.dw1[j];
  }
}

double log_wealth_path(const MarketParams& m, const TimeGrid& grid, std::span<const double> v,
                       std::span<const double> dw1, const StrategySchedule& strategy,
                       std::span<double> log_wealth) {
  strategy.require_covers(grid);
  if (v.size() < grid.n_nodes() || dw1.size() < grid.n_steps()) {
    throw DomainError("wealth simulation needs variance and dW1 on the whole grid");
  }
  const double dt = grid.dt();
  double x = std::log(m.w0);
  if (!log_wealth.empty()) log_wealth[0] = x;
  for (std::size_t j = 0; j < grid.n_steps(); ++j) {
    const double vp = std::max(v[j], 0.0);
    const double pi = strategy.pi[j];
    const double r = m.r.at(grid.node(j));
    x += (r + m.theta * pi * vp - 0.5 * pi * pi * vp) * dt + pi * std::sqrt(vp) * dw1[j];
    if (!log_wealth.empty()) log_wealth[j + 1] = x;
  }
  return x;
}

PathBundle simulate_volterra_heston(const VolterraHestonParams& h, const MarketParams& m,
                                    const TimeGrid& grid, std::size_t n_paths,
                                    const SimulationOptions& options) {
  const VolterraHestonSimulator sim(h, m, grid, options);
  PathBundle b{grid, n_paths, options.seed};
  const std::size_t steps = grid.n_steps();
  const std::size_t nodes = grid.n_nodes();
  b.w1.resize(n_paths * steps);
  b.w2.resize(n_paths * steps);
  b.v.resize(n_paths * nodes);
  b.s.resize(n_paths * nodes);
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    HestonPath path;
    for (std::size_t p = begin; p < end; ++p) {
      sim.simulate(p, path);
      std::copy(path.noise.dw1.begin(), path.noise.dw1.end(), b.w1.begin() + p * steps);
      std::copy(path.noise.dw2.begin(), path.noise.dw2.end(), b.w2.begin() + p * steps);
      std::copy(path.v.begin(), path.v.end(), b.v.begin() + p * nodes);
      for (std::size_t j = 0; j < nodes; ++j) b.s[p * nodes + j] = std::exp(path.log_s[j]);
    }
  });
  return b;
}

void simulate_wealth(PathBundle& bundle, const MarketParams& m, const StrategySchedule& strategy) {
  m.validate();
  const std::size_t steps = bundle.grid.n_steps();
  const std::size_t nodes = bundle.grid.n_nodes();
  if (bundle.v.size() != bundle.n_paths * nodes || bundle.w1.size() != bundle.n_paths * steps) {
    throw DomainError("bundle needs variance and W1 increments before simulating wealth");
  }
  strategy.require_covers(bundle.grid);
  std::vector<double> wealth(bundle.n_paths * nodes);
  parallel_for(bundle.n_paths, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      std::span<double> row(wealth.data() + p * nodes, nodes);
      log_wealth_path(m, bundle.grid, bundle.path_row(bundle.v, p, nodes),
                      bundle.path_row(bundle.w1, p, steps), strategy, row);
      for (double& x : row) x = std::exp(x);
    }
  });
  bundle.wealth = std::move(wealth);
}

std::vector<std::vector<double>> utility_samples(const VolterraHestonSimulator& sim,
                                                 const std::vector<StrategySchedule>& strategies,
                                                 std::size_t n_paths) {
  for (const auto& s : strategies) s.require_covers(sim.grid());
  const MarketParams& m = sim.market();
  const double g = m.gamma_ra;
  std::vector<std::vector<double>> out(strategies.size(), std::vector<double>(n_paths));
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    HestonPath path;
    for (std::size_t p = begin; p < end; ++p) {
      sim.simulate(p, path);
      for (std::size_t k = 0; k < strategies.size(); ++k) {
        const double x = log_wealth_path(m, sim.grid(), path.v, path.noise.dw1, strategies[k]);
        out[k][p] = std::exp(g * x) / g;
      }
    }
  });
  return out;
}

std::vector<double> exp_integral_samples(const VolterraHestonSimulator& sim, double a,
                                         std::size_t n_paths) {
  std::vector<double> out(n_paths);
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    HestonPath path;
    for (std::size_t p = begin; p < end; ++p) {
      sim.simulate(p, path);
      out[p] = std::exp(a * trapezoid(path.v, sim.grid().dt()));
    }
  });
  return out;
}

std::vector<double> variance_samples(const VolterraHestonSimulator& sim,
                                     const std::vector<std::size_t>& nodes, std::size_t n_paths) {
  for (std::size_t j : nodes) {
    if (j >= sim.grid().n_nodes()) throw DomainError("node index outside the grid");
  }
  std::vector<double> out(n_paths * nodes.size());
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    HestonPath path;
    for (std::size_t p = begin; p < end; ++p) {
      sim.simulate(p, path);
      for (std::size_t k = 0; k < nodes.size(); ++k) out[p * nodes.size() + k] = path.v[nodes[k]];
    }
  });
  return out;
}

std::vector<double> simulate_cir(const CirParams& p, const TimeGrid& grid, std::size_t n_paths,
                                 const SimulationOptions& options) {
  p.validate();
  const std::size_t nodes = grid.n_nodes();
  std::vector<double> out(n_paths * nodes);
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    BrownianIncrements noise;
    for (std::size_t path = begin; path < end; ++path) {
      draw_increments(grid, 0.0, options, path, noise);
      cir_path(p, grid.dt(), noise.dw1, {out.data() + path * nodes, nodes});
    }
  });
  return out;
}

double factor_loading(double x, double t) {
  if (x * t < 1e-8) return t * (1.0 - 0.5 * x * t);
  return -std::expm1(-x * t) / x;
}

void y_factor_path(double x, const TimeGrid& grid, std::span<const double> z,
                   std::span<double> y) {
  if (z.size() != grid.n_nodes() || y.size() != grid.n_nodes()) {
    throw DomainError("factor path length mismatch");
  }
  const double dt = grid.dt();
  const double decay = std::exp(-x * dt);
  // Response of Y over one cell to a unit slope of Z.
  const double corr = dt * dt * phi2(x * dt);
  y[0] = 0.0;
  for (std::size_t j = 0; j + 1 < z.size(); ++j) {
    const double gain = dt * factor_loading(x, grid.node(j + 1)) - corr;
    y[j + 1] = decay * y[j] + (z[j + 1] - z[j]) / dt * gain;
  }
}

PathBundle simulate_marchaud_factors(const MarchaudParams& p, const Quantization& q, double rho,
                                     const TimeGrid& grid, std::size_t n_paths,
                                     const SimulationOptions& options) {
  p.validate();
  if (q.alpha_m != p.alpha_m) {
    throw DomainError("quantization was built for a different alpha_m");
  }
  if (!(rho > -1.0 && rho < 1.0)) throw DomainError("rho must lie in (-1, 1)");
  const std::size_t steps = grid.n_steps();
  const std::size_t nodes = grid.n_nodes();
  const std::size_t atoms = q.n();
  PathBundle b{grid, n_paths, options.seed};
  b.w1.resize(n_paths * steps);
  b.w2.resize(n_paths * steps);
  std::vector<double> z(n_paths * nodes);
  std::vector<double> y(n_paths * atoms * nodes);
  const CirParams cir = p.factor();
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    BrownianIncrements noise;
    for (std::size_t path = begin; path < end; ++path) {
      draw_increments(grid, rho, options, path, noise);
      std::copy(noise.dw1.begin(), noise.dw1.end(), b.w1.begin() + path * steps);
      std::copy(noise.dw2.begin(), noise.dw2.end(), b.w2.begin() + path * steps);
      std::span<double> zrow(z.data() + path * nodes, nodes);
      cir_path(cir, grid.dt(), noise.db, zrow);
      for (std::size_t i = 0; i < atoms; ++i) {
        y_factor_path(q.atoms[i], grid, zrow, {y.data() + (path * atoms + i) * nodes, nodes});
      }
    }
  });
  b.z = std::move(z);
  b.y_factors = std::move(y);
  b.n_factors = atoms;
  return b;
}

}  // namespace roughmerton
