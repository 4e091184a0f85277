#pragma once

#include <optional>
#include <vector>

#include "roughmerton/models.hpp"
#include "roughmerton/riccati.hpp"

namespace roughmerton {

/// Admissibility conditions of the distortion ansatz. Every flag is the sign
/// of the slack stored next to it.
struct ConditionReport {
  double cond1_slack = 0.0;  // kappa^2 - 6 (g/(1-g))^2 theta^2 sigma^2
  double cond2_slack = 0.0;  // lambda
  double cond3_slack = 0.0;  // lambda^2 - 2 p (g/(1-g)) theta^2 sigma^2
  double p = 0.0;
  bool cond1 = false;
  bool cond2 = false;
  bool cond3 = false;

  double sup_abs_a = 0.0;    // sup_t |pi*(t)|
  double eta = 0.0;          // eta at the best a
  double eta_a = 0.0;        // best a from the scan
  double eta_slack = 0.0;    // kappa^2 - 2 eta sigma^2 at the best a
  bool eta_check = false;

  bool all_pass = false;
};

struct DistortionSolution {
  MarketParams market;
  VolterraHestonParams heston;
  double delta = 1.0;
  double lambda_tilde = 0.0;
  RiccatiSolution phi_curve;
  std::vector<double> xi0_curve;  // tilted forward variance on the grid
  double m0 = 1.0;
  double j0 = 0.0;
  StrategySchedule strategy;
  ConditionReport conditions;

  const TimeGrid& grid() const noexcept { return phi_curve.grid; }
  /// (theta + rho delta sigma phi(T - t)) / (1 - gamma) at any t in [0, T].
  double pi_star(double t) const;
};

/// (1 - gamma) / (1 - gamma + gamma rho^2).
double distortion_power(double gamma_ra, double rho);

/// kappa - gamma/(1-gamma) rho theta sigma.
double tilted_lambda(const MarketParams& m, const VolterraHestonParams& h);

/// max(1.01, 1/(2 delta) + 0.01).
double default_condition_p(double delta);
const std::vector<double>& default_eta_scan();

/// xi(s) = V0 (1 - int_0^s R) + mean_level int_0^s R, R the resolvent of
/// mean_rev * K.
std::vector<double> forward_variance(const VolterraHestonParams& h, double mean_rev,
                                     double mean_level, const TimeGrid& grid);

/// Evaluates the conditions against a solved strategy schedule. Throws
/// StagingError when the schedule is empty.
ConditionReport check_conditions(const MarketParams& m, const VolterraHestonParams& h,
                                 const StrategySchedule& strategy, double p,
                                 const std::vector<double>& a_scan);
ConditionReport check_conditions(const DistortionSolution& s, double p,
                                 const std::vector<double>& a_scan);

/// Solves for phi, the tilted forward variance, m0, j0 and pi*. Conditions
/// are evaluated with the default p and scan and reported, not enforced.
DistortionSolution solve_distortion(const MarketParams& m, const VolterraHestonParams& h,
                                    const TimeGrid& grid, const RiccatiOptions& options = {});

/// Pointwise HJB integrand F(pi, t) at variance level v, with
/// U1/M = rho delta sigma sqrt(v) phi(T - t).
double hjb_integrand(const DistortionSolution& s, double pi, double t, double v);

}  // namespace roughmerton
