#include "roughmerton/kernels.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "roughmerton/errors.hpp"

namespace roughmerton {

namespace {

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

// b^p - a^p without cancellation when [a, b] is short relative to a.
double power_difference(double a, double b, double p) {
  if (a <= 0.0) return std::pow(b, p);
  return std::pow(a, p) * std::expm1(p * std::log1p((b - a) / a));
}

// Regularised lower incomplete gamma increment P(s, y) - P(s, x), y >= x,
// switching to the upper function in the tail to avoid cancellation.
double gamma_p_difference(double s, double x, double y) {
  if (x > s) {
    return boost::math::gamma_q(s, x) - boost::math::gamma_q(s, y);
  }
  return boost::math::gamma_p(s, y) - boost::math::gamma_p(s, x);
}

void require_interval(double a, double b) {
  if (!(a >= 0.0) || !(b >= a) || !std::isfinite(b)) {
    throw DomainError("kernel integral needs 0 <= a <= b");
  }
}

}  // namespace

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Constant:
      return "constant";
    case KernelKind::Fractional:
      return "fractional";
    case KernelKind::Exponential:
      return "exponential";
    case KernelKind::Gamma:
      return "gamma";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "constant") return KernelKind::Constant;
  if (name == "fractional") return KernelKind::Fractional;
  if (name == "exponential") return KernelKind::Exponential;
  if (name == "gamma") return KernelKind::Gamma;
  throw DomainError("unknown kernel kind '" + name + "'");
}

KernelSpec::KernelSpec(KernelKind kind, double c, double alpha, double lambda)
    : kind_(kind), c_(c), alpha_(alpha), lambda_(lambda) {
  if (!finite_positive(c)) throw DomainError("kernel scale c must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("kernel exponent alpha must lie in (0, 1]");
  const bool needs_lambda = kind == KernelKind::Exponential || kind == KernelKind::Gamma;
  if (needs_lambda && !finite_positive(lambda)) {
    throw DomainError("kernel decay rate lambda must be positive");
  }
}

KernelSpec KernelSpec::constant(double c) { return {KernelKind::Constant, c, 1.0, 0.0}; }

KernelSpec KernelSpec::fractional(double c, double alpha) {
  return {KernelKind::Fractional, c, alpha, 0.0};
}

KernelSpec KernelSpec::exponential(double c, double lambda) {
  return {KernelKind::Exponential, c, 1.0, lambda};
}

KernelSpec KernelSpec::gamma(double c, double alpha, double lambda) {
  return {KernelKind::Gamma, c, alpha, lambda};
}

KernelSpec KernelSpec::scaled(double scale) const {
  if (!finite_positive(scale)) throw DomainError("kernel scale factor must be positive");
  return {kind_, c_ * scale, alpha_, lambda_};
}

KernelSpec KernelSpec::canonical() const {
  if (alpha_ == 1.0 && kind_ == KernelKind::Fractional) return constant(c_);
  if (alpha_ == 1.0 && kind_ == KernelKind::Gamma) return exponential(c_, lambda_);
  return *this;
}

std::string KernelSpec::describe() const {
  auto shortest = [](double x) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
  };
  std::ostringstream os;
  os << to_string(kind_) << "(c=" << shortest(c_);
  if (kind_ == KernelKind::Fractional || kind_ == KernelKind::Gamma) os << ", alpha=" << shortest(alpha_);
  if (kind_ == KernelKind::Exponential || kind_ == KernelKind::Gamma) os << ", lambda=" << shortest(lambda_);
  os << ")";
  return os.str();
}

double eval_kernel(const KernelSpec& spec, double t) {
  const KernelSpec k = spec.canonical();
  if (!std::isfinite(t)) throw DomainError("kernel argument must be finite");
  switch (k.kind()) {
    case KernelKind::Constant:
      return k.c();
    case KernelKind::Exponential:
      return k.c() * std::exp(-k.lambda() * t);
    case KernelKind::Fractional:
      if (!(t > 0.0)) throw DomainError("singular kernel evaluated at t <= 0");
      return k.c() * std::pow(t, k.alpha() - 1.0) / std::tgamma(k.alpha());
    case KernelKind::Gamma:
      if (!(t > 0.0)) throw DomainError("singular kernel evaluated at t <= 0");
      return k.c() * std::exp(-k.lambda() * t) * std::pow(t, k.alpha() - 1.0) /
             std::tgamma(k.alpha());
  }
  return 0.0;
}

double kernel_primitive(const KernelSpec& spec, double a, double b) {
  require_interval(a, b);
  const KernelSpec k = spec.canonical();
  switch (k.kind()) {
    case KernelKind::Constant:
      return k.c() * (b - a);
    case KernelKind::Fractional:
      return k.c() * power_difference(a, b, k.alpha()) / std::tgamma(k.alpha() + 1.0);
    case KernelKind::Exponential:
      return (k.c() / k.lambda()) * std::exp(-k.lambda() * a) *
             -std::expm1(-k.lambda() * (b - a));
    case KernelKind::Gamma:
      if (a == b) return 0.0;
      return k.c() * std::pow(k.lambda(), -k.alpha()) *
             gamma_p_difference(k.alpha(), k.lambda() * a, k.lambda() * b);
  }
  return 0.0;
}

double kernel_first_moment(const KernelSpec& spec, double a, double b) {
  require_interval(a, b);
  const KernelSpec k = spec.canonical();
  const double alpha = k.alpha();
  const double lambda = k.lambda();
  switch (k.kind()) {
    case KernelKind::Constant:
      return 0.5 * k.c() * (b - a) * (b + a);
    case KernelKind::Fractional:
      return k.c() * alpha * power_difference(a, b, alpha + 1.0) / std::tgamma(alpha + 2.0);
    case KernelKind::Exponential: {
      const double ea = std::exp(-lambda * a);
      const double eb = std::exp(-lambda * b);
      return k.c() * ((a / lambda + 1.0 / (lambda * lambda)) * ea -
                      (b / lambda + 1.0 / (lambda * lambda)) * eb);
    }
    case KernelKind::Gamma:
      if (a == b) return 0.0;
      return k.c() * alpha * std::pow(lambda, -alpha - 1.0) *
             gamma_p_difference(alpha + 1.0, lambda * a, lambda * b);
  }
  return 0.0;
}

ConvolutionWeights::ConvolutionWeights(const KernelSpec& spec, const TimeGrid& grid)
    : rect(grid.n_nodes(), 0.0), lin(grid.n_nodes(), 0.0) {
  const double dt = grid.dt();
  for (std::size_t lag = 1; lag <= grid.n_steps(); ++lag) {
    const double lo = grid.node(lag - 1);
    const double hi = grid.node(lag);
    rect[lag] = kernel_primitive(spec, lo, hi);
    // Left node t_i of the cell sits at s = hi; its hat function is (s - lo)/dt.
    lin[lag] = (kernel_first_moment(spec, lo, hi) - lo * rect[lag]) / dt;
  }
}

std::vector<double> convolve_grid(const ConvolutionWeights& w, std::span<const double> f) {
  if (f.size() != w.rect.size()) {
    throw DomainError("convolution input length does not match the grid");
  }
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t j = 1; j < f.size(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < j; ++i) acc += w.rect[j - i] * f[i];
    out[j] = acc;
  }
  return out;
}

std::vector<double> convolve_grid(const KernelSpec& spec, std::span<const double> f,
                                  const TimeGrid& grid) {
  if (f.size() != grid.n_nodes()) {
    throw DomainError("convolution input length does not match the grid");
  }
  return convolve_grid(ConvolutionWeights(spec, grid), f);
}

std::vector<double> resolvent_integral(const KernelSpec& spec, const TimeGrid& grid) {
  const KernelSpec k = spec.canonical();
  std::vector<double> out(grid.n_nodes(), 0.0);
  const double c = k.c();
  switch (k.kind()) {
    case KernelKind::Constant:
      for (std::size_t j = 1; j < out.size(); ++j) out[j] = -std::expm1(-c * grid.node(j));
      break;
    case KernelKind::Exponential: {
      const double rate = k.lambda() + c;
      for (std::size_t j = 1; j < out.size(); ++j) {
        out[j] = (c / rate) * -std::expm1(-rate * grid.node(j));
      }
      break;
    }
    case KernelKind::Fractional:
      for (std::size_t j = 1; j < out.size(); ++j) {
        const double ta = std::pow(grid.node(j), k.alpha());
        out[j] = c * ta * mittag_leffler(k.alpha(), k.alpha() + 1.0, -c * ta);
      }
      break;
    case KernelKind::Gamma: {
      // F = (1*K) - K*F, product trapezoid on the continuous unknown F.
      const ConvolutionWeights w(k, grid);
      for (std::size_t j = 1; j < out.size(); ++j) {
        double acc = kernel_primitive(k, 0.0, grid.node(j));
        for (std::size_t i = 0; i < j; ++i) {
          const std::size_t lag = j - i;
          acc -= w.lin[lag] * out[i];
          if (i + 1 < j) acc -= (w.rect[lag] - w.lin[lag]) * out[i + 1];
        }
        out[j] = acc / (1.0 + w.rect[1] - w.lin[1]);
      }
      break;
    }
  }
  return out;
}

ResolventCurve resolvent_second_kind(const KernelSpec& spec, const TimeGrid& grid) {
  const KernelSpec k = spec.canonical();
  ResolventCurve curve{grid, std::vector<double>(grid.n_nodes(), 0.0), ResolventSource::ClosedForm};
  auto& r = curve.values;
  const double c = k.c();
  switch (k.kind()) {
    case KernelKind::Constant:
      for (std::size_t j = 0; j < r.size(); ++j) r[j] = c * std::exp(-c * grid.node(j));
      break;
    case KernelKind::Exponential:
      for (std::size_t j = 0; j < r.size(); ++j) {
        r[j] = c * std::exp(-k.lambda() * grid.node(j)) * std::exp(-c * grid.node(j));
      }
      break;
    case KernelKind::Fractional: {
      const double alpha = k.alpha();
      for (std::size_t j = 1; j < r.size(); ++j) {
        const double t = grid.node(j);
        r[j] = c * std::pow(t, alpha - 1.0) * mittag_leffler(alpha, alpha, -c * std::pow(t, alpha));
      }
      const double dt = grid.dt();
      const double first = c * std::pow(dt, alpha) *
                           mittag_leffler(alpha, alpha + 1.0, -c * std::pow(dt, alpha));
      r[0] = first / dt;
      break;
    }
    case KernelKind::Gamma: {
      // R = K - K*R as a lower-triangular system in the node values.
      curve.source = ResolventSource::Numerical;
      const ConvolutionWeights w(k, grid);
      const auto integral = resolvent_integral(k, grid);
      r[0] = integral[1] / grid.dt();
      for (std::size_t j = 1; j < r.size(); ++j) {
        double acc = eval_kernel(k, grid.node(j));
        for (std::size_t i = 0; i < j; ++i) acc -= w.rect[j - i] * r[i];
        r[j] = acc;
      }
      break;
    }
  }
  return curve;
}

ResolventCurve resolvent_scaled(const KernelSpec& spec, double scale, const TimeGrid& grid) {
  return resolvent_second_kind(spec.scaled(scale), grid);
}

double resolvent_tolerance(const KernelSpec& spec, double dt) {
  return 5.0 * std::pow(dt, std::min(spec.canonical().alpha(), 1.0));
}

double resolvent_residual(const KernelSpec& spec, const ResolventCurve& curve) {
  const auto conv = convolve_grid(spec, curve.values, curve.grid);
  double worst = 0.0;
  for (std::size_t j = 1; j < conv.size(); ++j) {
    const double res = conv[j] - eval_kernel(spec, curve.grid.node(j)) + curve.values[j];
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

double first_kind_residual(const KernelSpec& spec, const TimeGrid& grid) {
  if (spec.kind() != KernelKind::Fractional || spec.alpha() >= 1.0) {
    throw DomainError("first-kind check needs a Fractional kernel with alpha < 1");
  }
  // Exact cell masses go on whichever of K and L is more singular; the
  // other one is sampled at cell midpoints.
  const double alpha = spec.alpha();
  const std::size_t n = grid.n_nodes();
  const double half = 0.5 * grid.dt();
  std::vector<double> mass(n, 0.0);   // by cell index
  std::vector<double> k_mid(n, 0.0);  // by lag
  if (alpha >= 0.5) {
    const double mass_scale = 1.0 / (spec.c() * std::tgamma(2.0 - alpha));
    for (std::size_t i = 0; i + 1 < n; ++i) {
      mass[i] = mass_scale * power_difference(grid.node(i), grid.node(i + 1), 1.0 - alpha);
      k_mid[i + 1] = eval_kernel(spec, grid.node(i) + half);
    }
  } else {
    const ConvolutionWeights w(spec, grid);
    const double l_scale = 1.0 / (spec.c() * std::tgamma(1.0 - alpha));
    for (std::size_t i = 0; i + 1 < n; ++i) {
      mass[i] = l_scale * std::pow(grid.node(i) + half, -alpha);
      k_mid[i + 1] = w.rect[i + 1];
    }
  }
  double worst = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < j; ++i) acc += mass[i] * k_mid[j - i];
    worst = std::max(worst, std::abs(acc - 1.0));
  }
  return worst;
}

}  // namespace roughmerton
