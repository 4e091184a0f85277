#pragma once

#include <cstddef>
#include <span>

namespace roughmerton {

/// Neumaier-compensated running sum. Reductions always run in index order.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_sum(std::span<const double> xs) noexcept;

struct SampleSummary {
  double mean = 0.0;
  double std_dev = 0.0;  // unbiased
  double std_err = 0.0;
  std::size_t n = 0;
};

SampleSummary summarize(std::span<const double> xs);

/// Mean over antithetic pairs (x_{2k} + x_{2k+1})/2, treating each pair as
/// one independent draw when estimating the standard error.
SampleSummary summarize_pairs(std::span<const double> xs);

/// |a - b| / sqrt(se_a^2 + se_b^2); zero when both errors vanish and a == b.
double z_score(double a, double se_a, double b, double se_b);

}  // namespace roughmerton
