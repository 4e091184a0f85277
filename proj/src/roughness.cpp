#include "roughmerton/roughness.hpp"

#include <cmath>

#include "roughmerton/errors.hpp"

namespace roughmerton {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("degenerate regression: regressor has zero variance");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace

double ScalingReport::fitted(std::size_t qi, std::size_t li) const {
  return std::exp(log_k_q[qi] + zeta_q[qi] * std::log(static_cast<double>(lags[li])));
}

double q_variation(std::span<const double> series, double q, std::size_t lag) {
  return q_variation(std::vector<std::span<const double>>{series}, q, lag);
}

double q_variation(const std::vector<std::span<const double>>& series, double q, std::size_t lag) {
  if (!(q > 0.0)) throw DomainError("moment order q must be positive");
  if (lag == 0) throw DomainError("lag must be at least one step");
  double acc = 0.0;
  std::size_t count = 0;
  for (const auto& s : series) {
    if (s.size() <= lag) continue;
    for (std::size_t t = 0; t + lag < s.size(); ++t) {
      acc += std::pow(std::abs(s[t + lag] - s[t]), q);
    }
    count += s.size() - lag;
  }
  if (count == 0) throw DomainError("insufficient data: series shorter than the lag");
  return acc / static_cast<double>(count);
}

ScalingReport fit_scaling(const std::vector<double>& qs, const std::vector<std::size_t>& lags,
                          std::vector<double> m_qd) {
  if (qs.size() < 2) throw DomainError("Hurst estimation needs at least two moment orders");
  if (lags.size() < 3) throw DomainError("Hurst estimation needs at least three lags");
  if (m_qd.size() != qs.size() * lags.size()) throw DomainError("moment table has wrong shape");
  ScalingReport rep;
  rep.qs = qs;
  rep.lags = lags;
  rep.m_qd = std::move(m_qd);
  std::vector<double> log_lag(lags.size());
  for (std::size_t l = 0; l < lags.size(); ++l) log_lag[l] = std::log(static_cast<double>(lags[l]));
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    std::vector<double> log_m(lags.size());
    for (std::size_t l = 0; l < lags.size(); ++l) {
      const double m = rep.m(qi, l);
      if (!(m > 0.0) || !std::isfinite(m)) {
        throw DomainError("degenerate regression: empirical moments must be positive");
      }
      log_m[l] = std::log(m);
    }
    const LineFit fit = ols(log_lag, log_m);
    rep.zeta_q.push_back(fit.slope);
    rep.log_k_q.push_back(fit.intercept);
    rep.r2.push_back(fit.r2);
  }
  double sqq = 0.0;
  double sqz = 0.0;
  double szz = 0.0;
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    sqq += qs[qi] * qs[qi];
    sqz += qs[qi] * rep.zeta_q[qi];
    szz += rep.zeta_q[qi] * rep.zeta_q[qi];
  }
  if (!(sqq > 0.0)) throw DomainError("degenerate regression: all moment orders are zero");
  rep.H_hat = sqz / sqq;
  double sse = 0.0;
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    const double e = rep.zeta_q[qi] - rep.H_hat * qs[qi];
    sse += e * e;
  }
  rep.r2_h = szz > 0.0 ? 1.0 - sse / szz : 1.0;
  return rep;
}

ScalingReport estimate_hurst(const std::vector<std::span<const double>>& series,
                             const std::vector<double>& qs, const std::vector<std::size_t>& lags) {
  if (qs.size() < 2) throw DomainError("Hurst estimation needs at least two moment orders");
  if (lags.size() < 3) throw DomainError("Hurst estimation needs at least three lags");
  std::vector<double> m(qs.size() * lags.size());
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    for (std::size_t l = 0; l < lags.size(); ++l) {
      m[qi * lags.size() + l] = q_variation(series, qs[qi], lags[l]);
    }
  }
  return fit_scaling(qs, lags, std::move(m));
}

ScalingReport estimate_hurst(std::span<const double> series, const std::vector<double>& qs,
                             const std::vector<std::size_t>& lags) {
  return estimate_hurst(std::vector<std::span<const double>>{series}, qs, lags);
}

}  // namespace roughmerton
