#pragma once

#include <span>
#include <string>
#include <vector>

#include "roughmerton/time_grid.hpp"

namespace roughmerton {

enum class KernelKind { Constant, Fractional, Exponential, Gamma };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

/// One of the four completely monotone convolution kernels:
///
///   Constant     K(t) = c
///   Fractional   K(t) = c t^(alpha-1) / Gamma(alpha)
///   Exponential  K(t) = c exp(-lambda t)
///   Gamma        K(t) = c exp(-lambda t) t^(alpha-1) / Gamma(alpha)
///
/// Parameters are validated on construction, so a KernelSpec that exists is
/// admissible. Unused parameters read as alpha = 1 and lambda = 0.
class KernelSpec {
 public:
  static KernelSpec constant(double c);
  static KernelSpec fractional(double c, double alpha);
  static KernelSpec exponential(double c, double lambda);
  static KernelSpec gamma(double c, double alpha, double lambda);

  KernelKind kind() const noexcept { return kind_; }
  double c() const noexcept { return c_; }
  double alpha() const noexcept { return alpha_; }
  double lambda() const noexcept { return lambda_; }

  /// Locally square integrable: fails only for Fractional with alpha <= 1/2.
  bool l2_ok() const noexcept { return kind_ != KernelKind::Fractional || alpha_ > 0.5; }
  bool singular_at_zero() const noexcept { return alpha_ < 1.0; }

  /// Same kernel with c replaced by scale * c.
  KernelSpec scaled(double scale) const;

  /// alpha = 1 collapses Fractional to Constant and Gamma to Exponential.
  /// Every numerical routine works on the canonical form so the degenerate
  /// cases agree bit for bit.
  KernelSpec canonical() const;

  std::string describe() const;

  bool operator==(const KernelSpec&) const = default;

 private:
  KernelSpec(KernelKind kind, double c, double alpha, double lambda);

  KernelKind kind_;
  double c_;
  double alpha_;
  double lambda_;
};

double eval_kernel(const KernelSpec& spec, double t);

/// Exact integral of K over [a, b], 0 <= a <= b.
double kernel_primitive(const KernelSpec& spec, double a, double b);

/// Exact integral of s * K(s) over [a, b].
double kernel_first_moment(const KernelSpec& spec, double a, double b);

/// E_{alpha,beta}(x) = sum_n x^n / Gamma(alpha n + beta).
///
/// Power series where it is well conditioned; for negative arguments that
/// would cancel catastrophically an integral representation is used instead
/// (alpha <= 1 only). Throws ConvergenceError when neither route can reach
/// roughly 1e-10 accuracy, including overflow for large positive x.
double mittag_leffler(double alpha, double beta, double x);

enum class ResolventSource { ClosedForm, Numerical };

/// Second-kind resolvent sampled on a grid. For kernels singular at zero,
/// values[0] holds the average of R over the first cell instead of R(0).
struct ResolventCurve {
  TimeGrid grid;
  std::vector<double> values;
  ResolventSource source;
};

ResolventCurve resolvent_second_kind(const KernelSpec& spec, const TimeGrid& grid);
ResolventCurve resolvent_scaled(const KernelSpec& spec, double scale, const TimeGrid& grid);

/// Integral of the second-kind resolvent, F(t_j) = int_0^{t_j} R(u) du.
/// Closed forms except for Gamma, where F = (1*K) - K*F is solved directly.
std::vector<double> resolvent_integral(const KernelSpec& spec, const TimeGrid& grid);

/// Lag-indexed product-integration weights on a uniform grid.
/// rect[L] = int_{(L-1)dt}^{L dt} K and lin[L] = int K(s) (s - (L-1)dt)/dt ds
/// over the same interval, L = 1..n_steps (index 0 unused). For the cell
/// [t_i, t_{i+1}] seen from t_j (L = j - i), lin[L] multiplies f(t_i) and
/// rect[L] - lin[L] multiplies f(t_{i+1}) under linear interpolation.
struct ConvolutionWeights {
  ConvolutionWeights(const KernelSpec& spec, const TimeGrid& grid);

  std::vector<double> rect;
  std::vector<double> lin;
};

/// Piecewise-constant product integration:
/// (K*f)(t_j) = sum_{i<j} int_{t_i}^{t_{i+1}} K(t_j - u) du * f(t_i).
std::vector<double> convolve_grid(const KernelSpec& spec, std::span<const double> f,
                                  const TimeGrid& grid);
std::vector<double> convolve_grid(const ConvolutionWeights& w, std::span<const double> f);

/// max_{j>=1} |(K*R)(t_j) - K(t_j) + R(t_j)| with convolve_grid.
double resolvent_residual(const KernelSpec& spec, const ResolventCurve& curve);

/// Residual tolerance 5 dt^min(alpha, 1).
double resolvent_tolerance(const KernelSpec& spec, double dt);

/// max_{j>=1} |(K*L)(t_j) - 1| for the Fractional kernel with its first-kind
/// resolvent L(t) = t^(-alpha) / (c Gamma(1-alpha)). The more singular of the
/// two enters through exact cell masses, the other is sampled at cell
/// midpoints (L masses for alpha >= 1/2, K masses below).
double first_kind_residual(const KernelSpec& spec, const TimeGrid& grid);

}  // namespace roughmerton
