#include "roughmerton/markov_approx.hpp"

#include <algorithm>
#include <cmath>

#include "roughmerton/distortion.hpp"
#include "roughmerton/errors.hpp"
#include "roughmerton/parallel.hpp"
#include "roughmerton/riccati.hpp"
#include "roughmerton/statistics.hpp"

namespace roughmerton {

namespace {

void require_alpha(double alpha_m) {
  if (!(alpha_m > -1.0 && alpha_m < -0.5)) {
    throw DomainError("alpha_m must lie strictly inside (-1, -1/2)");
  }
}

double density_norm(double alpha_m) {
  return std::tgamma(-alpha_m) * std::tgamma(alpha_m + 1.0);
}

// b^p - a^p without cancellation for close knots.
double pow_diff(double a, double b, double p) {
  return std::pow(a, p) * std::expm1(p * std::log(b / a));
}

double z_coefficient(double alpha_m, double t) {
  return std::pow(t, -alpha_m - 1.0) / std::tgamma(-alpha_m);
}

void require_rho_zero(const MarketParams& m) {
  if (m.rho != 0.0) {
    throw DomainError(
        "the Markovian approximation value is only available for rho = 0; "
        "the general-rho problem needs the HJB equation, which is not solved here");
  }
}

// One-step coefficients of the Y^x recursion, shared by every path.
struct FactorStepper {
  std::vector<double> decay;  // per atom
  std::vector<double> gain;   // n_atoms x n_steps

  FactorStepper(const Quantization& q, const TimeGrid& grid) {
    const std::size_t steps = grid.n_steps();
    const double dt = grid.dt();
    decay.resize(q.n());
    gain.resize(q.n() * steps);
    for (std::size_t i = 0; i < q.n(); ++i) {
      const double x = q.atoms[i];
      decay[i] = std::exp(-x * dt);
      const double xd = x * dt;
      const double psi = xd < 1e-3 ? 0.5 - xd / 6.0 + xd * xd / 24.0 : (xd + std::expm1(-xd)) / (xd * xd);
      const double corr = dt * dt * psi;
      for (std::size_t j = 0; j < steps; ++j) {
        gain[i * steps + j] = dt * factor_loading(x, grid.node(j + 1)) - corr;
      }
    }
  }
};

double fk_log_integral(const MarchaudParams& p, const MarketParams& m, const TimeGrid& grid,
                       std::span<const double> nu) {
  const double g = m.gamma_ra;
  const double coef = g * m.theta * m.theta / (2.0 * (1.0 - g));
  std::vector<double> f(grid.n_nodes());
  for (std::size_t j = 0; j < f.size(); ++j) {
    f[j] = g * m.r.at(grid.node(j)) + coef * std::max(nu[j], p.floor_eps);
  }
  return trapezoid(f, grid.dt());
}

}  // namespace

std::string to_string(Spacing s) { return s == Spacing::Geometric ? "geometric" : "linear"; }

Spacing spacing_from_string(const std::string& name) {
  if (name == "geometric") return Spacing::Geometric;
  if (name == "linear") return Spacing::Linear;
  throw DomainError("unknown partition spacing '" + name + "' (geometric or linear)");
}

std::vector<double> PartitionSpec::knots() const {
  if (!(xi_min > 0.0) || !(xi_max > xi_min) || !std::isfinite(xi_max)) {
    throw DomainError("partition needs 0 < xi_min < xi_max");
  }
  if (n < 1) throw DomainError("partition needs at least one cell");
  std::vector<double> k(n + 1);
  const double fn = static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) / fn;
    k[i] = spacing == Spacing::Geometric ? xi_min * std::pow(xi_max / xi_min, s)
                                         : xi_min + (xi_max - xi_min) * s;
  }
  k.front() = xi_min;
  k.back() = xi_max;
  return k;
}

double mu_tilde_density(double alpha_m, double x) {
  require_alpha(alpha_m);
  if (!(x > 0.0)) throw DomainError("mixing density is defined for x > 0");
  return std::pow(x, alpha_m + 1.0) / density_norm(alpha_m);
}

Quantization build_quantization(double alpha_m, const PartitionSpec& spec) {
  return build_quantization(alpha_m, spec.knots());
}

Quantization build_quantization(double alpha_m, std::vector<double> knots) {
  require_alpha(alpha_m);
  if (knots.size() < 2) throw DomainError("partition needs at least two knots");
  if (!(knots.front() > 0.0)) throw DomainError("partition knots must be positive");
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i] > knots[i - 1])) throw DomainError("partition knots must increase strictly");
  }
  Quantization q;
  q.alpha_m = alpha_m;
  const double norm = density_norm(alpha_m);
  const double p2 = alpha_m + 2.0;
  const double p3 = alpha_m + 3.0;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double m0 = pow_diff(knots[i - 1], knots[i], p2) / p2;
    const double m1 = pow_diff(knots[i - 1], knots[i], p3) / p3;
    q.masses.push_back(m0 / norm);
    // Clamp against rounding at the cell edges.
    q.atoms.push_back(std::clamp(m1 / m0, knots[i - 1], knots[i]));
  }
  q.partition = std::move(knots);
  return q;
}

LaplaceCheck laplace_check(const Quantization& q, double t) {
  require_alpha(q.alpha_m);
  if (!(t > 0.0)) throw DomainError("Laplace check needs t > 0");
  CompensatedSum acc;
  for (std::size_t i = 0; i < q.n(); ++i) acc.add(q.masses[i] * std::exp(-t * q.atoms[i]));
  LaplaceCheck out;
  out.discrete = acc.value();
  out.exact = (q.alpha_m + 1.0) / std::tgamma(-q.alpha_m) * std::pow(t, -q.alpha_m - 2.0);
  out.abs_err = std::abs(out.discrete - out.exact);
  return out;
}

bool is_nested(const std::vector<double>& coarse, const std::vector<double>& fine) {
  std::size_t k = 0;
  for (double c : coarse) {
    while (k < fine.size() && fine[k] < c * (1.0 - 1e-12)) ++k;
    if (k == fine.size() || std::abs(fine[k] - c) > 1e-12 * std::abs(c)) return false;
  }
  return true;
}

ApproxVolPaths assemble_approx_vol(const MarchaudParams& p, const Quantization& q,
                                   std::span<const double> z_paths,
                                   std::span<const double> y_paths, const TimeGrid& grid) {
  p.validate();
  if (q.alpha_m != p.alpha_m) throw DomainError("quantization was built for a different alpha_m");
  const std::size_t nodes = grid.n_nodes();
  if (z_paths.size() % nodes != 0) throw DomainError("Z paths do not match the grid");
  const std::size_t n_paths = z_paths.size() / nodes;
  if (y_paths.size() != n_paths * q.n() * nodes) {
    throw DomainError("factor paths do not match the grid and quantization");
  }
  std::vector<double> zc(nodes, 0.0);
  for (std::size_t j = 1; j < nodes; ++j) zc[j] = z_coefficient(p.alpha_m, grid.node(j));
  ApproxVolPaths out;
  out.nu.assign(n_paths * nodes, 0.0);
  out.variance.assign(n_paths * nodes, 0.0);
  for (std::size_t path = 0; path < n_paths; ++path) {
    double* nu = out.nu.data() + path * nodes;
    const double* z = z_paths.data() + path * nodes;
    for (std::size_t j = 1; j < nodes; ++j) nu[j] = 0.0;
    for (std::size_t i = 0; i < q.n(); ++i) {
      const double* y = y_paths.data() + (path * q.n() + i) * nodes;
      for (std::size_t j = 1; j < nodes; ++j) nu[j] += q.masses[i] * y[j];
    }
    for (std::size_t j = 1; j < nodes; ++j) nu[j] = p.nu0 + z[j] * zc[j] + nu[j];
    nu[0] = nodes > 1 ? nu[1] : p.nu0;
    for (std::size_t j = 0; j < nodes; ++j) {
      out.variance[path * nodes + j] = std::max(nu[j], p.floor_eps);
    }
  }
  return out;
}

std::vector<double> feynman_kac_samples(const MarchaudParams& p, const MarketParams& m,
                                        const Quantization& q, const TimeGrid& grid,
                                        std::size_t n_paths, const SimulationOptions& options) {
  p.validate();
  m.validate();
  require_rho_zero(m);
  if (q.alpha_m != p.alpha_m) throw DomainError("quantization was built for a different alpha_m");
  if (n_paths == 0) throw DomainError("need at least one path");
  const FactorStepper stepper(q, grid);
  const std::size_t steps = grid.n_steps();
  const std::size_t nodes = grid.n_nodes();
  const double dt = grid.dt();
  std::vector<double> zc(nodes, 0.0);
  for (std::size_t j = 1; j < nodes; ++j) zc[j] = z_coefficient(p.alpha_m, grid.node(j));
  const double scale = std::pow(m.w0, m.gamma_ra) / m.gamma_ra;
  const CirParams cir = p.factor();

  std::vector<double> out(n_paths);
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    BrownianIncrements noise;
    std::vector<double> z(nodes);
    std::vector<double> nu(nodes);
    for (std::size_t path = begin; path < end; ++path) {
      draw_increments(grid, 0.0, options, path, noise);
      cir_path(cir, dt, noise.db, z);
      std::fill(nu.begin(), nu.end(), 0.0);
      for (std::size_t i = 0; i < q.n(); ++i) {
        const double* gain = stepper.gain.data() + i * steps;
        const double decay = stepper.decay[i];
        double y = 0.0;
        for (std::size_t j = 0; j < steps; ++j) {
          y = decay * y + (z[j + 1] - z[j]) / dt * gain[j];
          nu[j + 1] += q.masses[i] * y;
        }
      }
      for (std::size_t j = 1; j < nodes; ++j) nu[j] = p.nu0 + z[j] * zc[j] + nu[j];
      nu[0] = nodes > 1 ? nu[1] : p.nu0;
      out[path] = scale * std::exp(fk_log_integral(p, m, grid, nu));
    }
  });
  return out;
}

ApproxValue feynman_kac_value(const MarchaudParams& p, const MarketParams& m,
                              const Quantization& q, const TimeGrid& grid, std::size_t n_paths,
                              const SimulationOptions& options) {
  const auto samples = feynman_kac_samples(p, m, q, grid, n_paths, options);
  const SampleSummary s = options.antithetic ? summarize_pairs(samples) : summarize(samples);
  if (!std::isfinite(s.mean)) throw NumericalError("Feynman-Kac estimate is not finite");
  return {q.n(), s.mean, s.std_err, n_paths, options.seed};
}

ConvergenceTable convergence_study(const MarchaudParams& p, const MarketParams& m,
                                   const std::vector<PartitionSpec>& specs, const TimeGrid& grid,
                                   std::size_t n_paths, const SimulationOptions& options) {
  if (specs.empty()) throw DomainError("convergence study needs at least one partition");
  ConvergenceTable table;
  std::vector<double> prev_knots;
  std::vector<double> prev_samples;
  for (const PartitionSpec& spec : specs) {
    auto knots = spec.knots();
    if (!prev_knots.empty() && !is_nested(prev_knots, knots)) {
      throw DomainError("convergence study needs nested partitions");
    }
    const Quantization q = build_quantization(p.alpha_m, knots);
    auto samples = feynman_kac_samples(p, m, q, grid, n_paths, options);
    const SampleSummary s = options.antithetic ? summarize_pairs(samples) : summarize(samples);
    ConvergenceRow row;
    row.value = {q.n(), s.mean, s.std_err, n_paths, options.seed};
    if (!table.rows.empty()) {
      const ApproxValue& last = table.rows.back().value;
      row.diff = s.mean - last.estimate;
      row.combined_se = std::sqrt(s.std_err * s.std_err + last.std_err * last.std_err);
      std::vector<double> d(samples.size());
      for (std::size_t k = 0; k < d.size(); ++k) d[k] = samples[k] - prev_samples[k];
      row.paired_se = (options.antithetic ? summarize_pairs(d) : summarize(d)).std_err;
    }
    table.rows.push_back(row);
    prev_knots = std::move(knots);
    prev_samples = std::move(samples);
  }
  table.nondecreasing = true;
  for (std::size_t k = 1; k < table.rows.size(); ++k) {
    if (table.rows[k].diff < -table.rows[k].combined_se) table.nondecreasing = false;
  }
  table.stabilizing = table.rows.size() < 2 ||
                      std::abs(table.rows.back().diff) <= 2.0 * table.rows.back().combined_se;
  return table;
}

StrategySchedule optimal_strategy_rho0(const MarketParams& m, const TimeGrid& grid) {
  m.validate();
  require_rho_zero(m);
  return StrategySchedule::constant(grid, m.theta / (1.0 - m.gamma_ra));
}

ApproxValue heston_feynman_kac_value(const VolterraHestonParams& h, const MarketParams& m,
                                     const TimeGrid& grid, std::size_t n_paths,
                                     const SimulationOptions& options) {
  h.validate();
  m.validate();
  const KernelSpec k = h.kernel.canonical();
  if (k.kind() != KernelKind::Constant) {
    throw DomainError("the Markovian Feynman-Kac route needs the Constant kernel");
  }
  if (n_paths == 0) throw DomainError("need at least one path");
  const double g = m.gamma_ra;
  const double delta = distortion_power(g, m.rho);
  const double lambda = tilted_lambda(m, h);
  if (!(lambda > 0.0)) throw DomainError("tilted mean reversion lambda must be positive");
  const CirParams cir{h.v0, k.c() * lambda, h.kappa * h.phi_mean / lambda, k.c() * h.sigma};
  const double coef = g * m.theta * m.theta / (2.0 * delta * (1.0 - g));
  const double dt = grid.dt();

  const auto samples = parallel_map(n_paths, [&](std::size_t path) {
    BrownianIncrements noise;
    std::vector<double> v(grid.n_nodes());
    draw_increments(grid, 0.0, options, path, noise);
    cir_path(cir, dt, noise.dw2, v);
    return std::exp(coef * trapezoid(v, dt));
  });
  const SampleSummary s = options.antithetic ? summarize_pairs(samples) : summarize(samples);
  std::vector<double> r(grid.n_nodes());
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = g * m.r.at(grid.node(j));
  const double scale = std::pow(m.w0, g) / g * std::exp(trapezoid(r, dt));
  const double value = scale * std::pow(s.mean, delta);
  const double se = scale * delta * std::pow(s.mean, delta - 1.0) * s.std_err;
  return {0, value, se, n_paths, options.seed};
}

}  // namespace roughmerton
