#include "roughmerton/distortion.hpp"

#include <algorithm>
#include <cmath>

#include "roughmerton/errors.hpp"

namespace roughmerton {

double distortion_power(double gamma_ra, double rho) {
  if (!(gamma_ra > 0.0 && gamma_ra < 1.0)) throw DomainError("gamma must lie in (0, 1)");
  if (!(rho > -1.0 && rho < 1.0)) throw DomainError("rho must lie in (-1, 1)");
  return (1.0 - gamma_ra) / (1.0 - gamma_ra + gamma_ra * rho * rho);
}

double tilted_lambda(const MarketParams& m, const VolterraHestonParams& h) {
  const double g = m.gamma_ra;
  return h.kappa - g / (1.0 - g) * m.rho * m.theta * h.sigma;
}

double default_condition_p(double delta) { return std::max(1.01, 0.5 / delta + 0.01); }

const std::vector<double>& default_eta_scan() {
  static const std::vector<double> scan{1.1, 1.5, 2.0, 4.0};
  return scan;
}

std::vector<double> forward_variance(const VolterraHestonParams& h, double mean_rev,
                                     double mean_level, const TimeGrid& grid) {
  if (!(mean_rev > 0.0) || !std::isfinite(mean_rev)) {
    throw DomainError("forward variance needs a positive mean reversion");
  }
  const auto big_r = resolvent_integral(h.kernel.scaled(mean_rev), grid);
  std::vector<double> xi(big_r.size());
  for (std::size_t j = 0; j < xi.size(); ++j) {
    xi[j] = h.v0 * (1.0 - big_r[j]) + mean_level * big_r[j];
  }
  xi[0] = h.v0;
  return xi;
}

ConditionReport check_conditions(const MarketParams& m, const VolterraHestonParams& h,
                                 const StrategySchedule& strategy, double p,
                                 const std::vector<double>& a_scan) {
  if (strategy.pi.empty()) {
    throw StagingError("conditions need the solved strategy; run solve_distortion first");
  }
  const double delta = distortion_power(m.gamma_ra, m.rho);
  if (!(p > std::max(1.0, 0.5 / delta))) {
    throw DomainError("condition exponent p must exceed max(1, 1/(2 delta))");
  }
  if (a_scan.empty()) throw DomainError("eta scan needs at least one value of a");
  for (double a : a_scan) {
    if (!(a > 1.0)) throw DomainError("eta scan values must exceed 1");
  }
  const double g = m.gamma_ra / (1.0 - m.gamma_ra);
  const double th2s2 = m.theta * m.theta * h.sigma * h.sigma;
  const double kappa2 = h.kappa * h.kappa;

  ConditionReport rep;
  rep.p = p;
  rep.cond1_slack = kappa2 - 6.0 * g * g * th2s2;
  rep.cond2_slack = tilted_lambda(m, h);
  rep.cond3_slack = rep.cond2_slack * rep.cond2_slack - 2.0 * p * g * th2s2;
  rep.cond1 = rep.cond1_slack > 0.0;
  rep.cond2 = rep.cond2_slack > 0.0;
  rep.cond3 = rep.cond3_slack > 0.0;

  for (double pi : strategy.pi) rep.sup_abs_a = std::max(rep.sup_abs_a, std::abs(pi));
  const double s = rep.sup_abs_a;
  bool first = true;
  for (double a : a_scan) {
    const double eta =
        std::max(2.0 * a * std::abs(m.theta) * s, 2.0 * a * (4.0 * a - 1.0) * s * s);
    const double slack = kappa2 - 2.0 * eta * h.sigma * h.sigma;
    if (first || slack > rep.eta_slack) {
      rep.eta = eta;
      rep.eta_a = a;
      rep.eta_slack = slack;
      first = false;
    }
  }
  rep.eta_check = rep.eta_slack > 0.0;
  rep.all_pass = rep.cond1 && rep.cond2 && rep.cond3 && rep.eta_check;
  return rep;
}

ConditionReport check_conditions(const DistortionSolution& s, double p,
                                 const std::vector<double>& a_scan) {
  return check_conditions(s.market, s.heston, s.strategy, p, a_scan);
}

double DistortionSolution::pi_star(double t) const {
  const double phi = phi_curve.at(market.T - t);
  return (market.theta + market.rho * delta * heston.sigma * phi) / (1.0 - market.gamma_ra);
}

DistortionSolution solve_distortion(const MarketParams& m, const VolterraHestonParams& h,
                                    const TimeGrid& grid, const RiccatiOptions& options) {
  m.validate();
  h.validate();
  if (std::abs(grid.horizon() - m.T) > 1e-9 * std::max(1.0, m.T)) {
    throw DomainError("grid horizon must equal the investment horizon T");
  }
  const double delta = distortion_power(m.gamma_ra, m.rho);
  const double lambda = tilted_lambda(m, h);
  if (!(lambda > 0.0)) throw DomainError("tilted mean reversion lambda must be positive");
  const double g = m.gamma_ra;
  const RiccatiCoefficients coeffs{g * m.theta * m.theta / (2.0 * delta * (1.0 - g)), -lambda,
                                   0.5 * h.sigma * h.sigma};
  DistortionSolution s{.market = m,
                       .heston = h,
                       .delta = delta,
                       .lambda_tilde = lambda,
                       .phi_curve = solve_riccati(h.kernel, coeffs, grid, options),
                       .xi0_curve = forward_variance(h, lambda, h.kappa * h.phi_mean / lambda, grid),
                       .m0 = 1.0,
                       .j0 = 0.0,
                       .strategy = StrategySchedule::constant(grid, 0.0),
                       .conditions = {}};

  const std::size_t n = grid.n_steps();
  std::vector<double> integrand(grid.n_nodes());
  for (std::size_t j = 0; j <= n; ++j) {
    const double u = grid.node(j);
    const double xi = s.xi0_curve[j];
    const double phi = s.phi_curve.values[n - j];
    integrand[j] = g * m.r.at(u) + g * m.theta * m.theta * xi / (2.0 * (1.0 - g)) +
                   0.5 * s.delta * h.sigma * h.sigma * xi * phi * phi;
  }
  s.m0 = std::exp(trapezoid(integrand, grid.dt()));
  if (!(s.m0 > 0.0) || !std::isfinite(s.m0)) {
    throw NumericalError("value-process level m0 is not a positive finite number");
  }
  s.j0 = std::pow(m.w0, g) / g * s.m0;

  for (std::size_t j = 0; j <= n; ++j) {
    s.strategy.pi[j] =
        (m.theta + m.rho * s.delta * h.sigma * s.phi_curve.values[n - j]) / (1.0 - g);
  }
  s.conditions = check_conditions(s, default_condition_p(s.delta), default_eta_scan());
  return s;
}

double hjb_integrand(const DistortionSolution& s, double pi, double t, double v) {
  if (v < 0.0) throw DomainError("variance level must be non-negative");
  const double g = s.market.gamma_ra;
  const double sv = std::sqrt(v);
  const double u_over_m = s.market.rho * s.delta * s.heston.sigma * sv *
                          s.phi_curve.at(s.market.T - t);
  const double drift = s.market.theta * sv + u_over_m;
  return pi * pi * g * (g - 1.0) / 2.0 * v + pi * drift * g * sv -
         g / (2.0 * (1.0 - g)) * drift * drift;
}

}  // namespace roughmerton
