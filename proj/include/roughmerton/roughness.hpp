#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace roughmerton {

/// Result of the two-stage moment-scaling regression
///   m(q, lag) = mean |x_{t+lag} - x_t|^q ~ K_q lag^{zeta_q},  zeta_q ~ H q.
struct ScalingReport {
  std::vector<double> qs;
  std::vector<std::size_t> lags;
  std::vector<double> m_qd;          // qs.size() x lags.size(), row per q
  std::vector<double> zeta_q;        // slope of log m on log lag
  std::vector<double> log_k_q;       // intercepts
  std::vector<double> r2;            // per-q fit quality
  double H_hat = 0.0;                // slope of zeta_q on q through the origin
  double r2_h = 0.0;                 // uncentred R^2 of that fit

  double m(std::size_t qi, std::size_t li) const { return m_qd[qi * lags.size() + li]; }
  double fitted(std::size_t qi, std::size_t li) const;
};

/// Mean of |x_{t+lag} - x_t|^q over all overlapping increments.
double q_variation(std::span<const double> series, double q, std::size_t lag);

/// Pooled over several independent series (all increments weighted equally).
double q_variation(const std::vector<std::span<const double>>& series, double q, std::size_t lag);

ScalingReport estimate_hurst(std::span<const double> series, const std::vector<double>& qs,
                             const std::vector<std::size_t>& lags);
ScalingReport estimate_hurst(const std::vector<std::span<const double>>& series,
                             const std::vector<double>& qs, const std::vector<std::size_t>& lags);

/// Regression stage only, from an already tabulated m(q, lag).
ScalingReport fit_scaling(const std::vector<double>& qs, const std::vector<std::size_t>& lags,
                          std::vector<double> m_qd);

}  // namespace roughmerton
