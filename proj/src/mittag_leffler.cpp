#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>

#include "roughmerton/errors.hpp"
#include "roughmerton/kernels.hpp"

namespace roughmerton {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();
constexpr int kMaxTerms = 10000;
// Largest term magnitude the series may reach before cancellation eats into
// the 1e-10 target.
constexpr double kCancellationLimit = 1e4;

double reciprocal_gamma(double x) {
  // 1/Gamma has zeros at the non-positive integers.
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  return 1.0 / std::tgamma(x);
}

struct SeriesResult {
  double sum = 0.0;
  double max_term = 0.0;
  bool converged = false;
};

SeriesResult power_series(double alpha, double beta, double x) {
  SeriesResult out;
  const double log_abs_x = std::log(std::abs(x));
  double compensation = 0.0;
  for (int n = 0; n < kMaxTerms; ++n) {
    const double arg = alpha * n + beta;
    double term;
    if (arg < 170.0) {
      term = std::pow(x, n) * reciprocal_gamma(arg);
    } else {
      const double magnitude = std::exp(n * log_abs_x - std::lgamma(arg));
      term = (x < 0.0 && n % 2 == 1) ? -magnitude : magnitude;
    }
    if (!std::isfinite(term)) return out;
    out.max_term = std::max(out.max_term, std::abs(term));
    // Neumaier summation.
    const double next = out.sum + term;
    if (std::abs(out.sum) >= std::abs(term)) {
      compensation += (out.sum - next) + term;
    } else {
      compensation += (term - next) + out.sum;
    }
    out.sum = next;
    if (n > 2 && std::abs(term) < 1e-16 * std::abs(out.sum + compensation) &&
        arg > 1.0) {
      out.sum += compensation;
      out.converged = std::isfinite(out.sum);
      return out;
    }
  }
  return out;
}

// E_{alpha,beta}(z) for z < 0, 0 < alpha < 1, beta < 1 + alpha, by the real
// integral representation
//   E = int_0^inf chi^((1-beta)/alpha) exp(-chi^(1/alpha))
//         (chi sin(pi(1-beta)) - z sin(pi(1-beta+alpha)))
//         / (alpha pi (chi^2 - 2 chi z cos(alpha pi) + z^2)) dchi.
double negative_axis_integral(double alpha, double beta, double z) {
  const double s1 = std::sin(kPi * (1.0 - beta));
  const double s2 = std::sin(kPi * (1.0 - beta + alpha));
  const double cos_a = std::cos(alpha * kPi);
  const double p = (1.0 - beta) / alpha;
  auto integrand = [=](double chi) {
    if (chi <= 0.0) return 0.0;
    const double denom = chi * chi - 2.0 * chi * z * cos_a + z * z;
    const double value = std::pow(chi, p) * std::exp(-std::pow(chi, 1.0 / alpha)) *
                         (chi * s1 - z * s2) / (alpha * kPi * denom);
    return std::isfinite(value) ? value : 0.0;
  };
  const double split = std::abs(z);
  boost::math::quadrature::tanh_sinh<double> near;
  boost::math::quadrature::exp_sinh<double> far;
  double err_near = 0.0;
  double err_far = 0.0;
  double l1_near = 0.0;
  double l1_far = 0.0;
  const double tol = 1e-13;
  const double a = near.integrate(integrand, 0.0, split, tol, &err_near, &l1_near);
  const double b = far.integrate(integrand, split, std::numeric_limits<double>::infinity(), tol,
                                 &err_far, &l1_far);
  const double total = a + b;
  if (!std::isfinite(total) || err_near * l1_near + err_far * l1_far > 1e-10) {
    throw ConvergenceError("Mittag-Leffler integral representation did not converge");
  }
  return total;
}

// alpha == 1, z < 0.
double unit_alpha_negative(double beta, double z) {
  if (beta == 1.0) return std::exp(z);
  if (beta < 1.0) {
    // E_{1,beta} = 1/Gamma(beta) + z E_{1,beta+1}.
    return reciprocal_gamma(beta) + z * unit_alpha_negative(beta + 1.0, z);
  }
  // E_{1,beta}(z) = int_0^1 e^{z s} (1-s)^(beta-2) ds / Gamma(beta-1).
  boost::math::quadrature::tanh_sinh<double> rule;
  auto integrand = [=](double s, double complement) {
    const double one_minus = complement > 0.0 ? complement : 1.0 - s;
    return std::exp(z * s) * std::pow(one_minus, beta - 2.0);
  };
  double err = 0.0;
  double l1 = 0.0;
  const double value = rule.integrate(integrand, 0.0, 1.0, 1e-13, &err, &l1);
  if (!std::isfinite(value) || err * l1 > 1e-10) {
    throw ConvergenceError("Mittag-Leffler integral for alpha = 1 did not converge");
  }
  return value / std::tgamma(beta - 1.0);
}

double negative_axis(double alpha, double beta, double z) {
  if (alpha == 1.0) return unit_alpha_negative(beta, z);
  if (beta >= 1.0 + alpha) {
    // E_{alpha,beta} = (E_{alpha,beta-alpha} - 1/Gamma(beta-alpha)) / z.
    return (negative_axis(alpha, beta - alpha, z) - reciprocal_gamma(beta - alpha)) / z;
  }
  return negative_axis_integral(alpha, beta, z);
}

}  // namespace

double mittag_leffler(double alpha, double beta, double x) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw DomainError("Mittag-Leffler parameters must be positive");
  }
  if (std::isnan(x)) throw DomainError("Mittag-Leffler argument is NaN");
  if (x == 0.0) return reciprocal_gamma(beta);

  const SeriesResult series = power_series(alpha, beta, x);
  const bool well_conditioned = x > 0.0 || series.max_term < kCancellationLimit;
  if (series.converged && well_conditioned) return series.sum;

  if (x < 0.0 && alpha <= 1.0) return negative_axis(alpha, beta, x);
  throw ConvergenceError("Mittag-Leffler evaluation cannot reach the accuracy target");
}

}  // namespace roughmerton
