#include "roughmerton/statistics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "roughmerton/errors.hpp"

namespace roughmerton {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

SampleSummary summarize(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("cannot summarise an empty sample");
  SampleSummary out;
  out.n = xs.size();
  out.mean = compensated_sum(xs) / static_cast<double>(out.n);
  if (out.n > 1) {
    CompensatedSum sq;
    for (double x : xs) sq.add((x - out.mean) * (x - out.mean));
    out.std_dev = std::sqrt(sq.value() / static_cast<double>(out.n - 1));
    out.std_err = out.std_dev / std::sqrt(static_cast<double>(out.n));
  }
  return out;
}

SampleSummary summarize_pairs(std::span<const double> xs) {
  if (xs.size() < 2 || xs.size() % 2 != 0) {
    throw DomainError("antithetic summary needs an even, non-empty sample");
  }
  std::vector<double> pairs(xs.size() / 2);
  for (std::size_t k = 0; k < pairs.size(); ++k) pairs[k] = 0.5 * (xs[2 * k] + xs[2 * k + 1]);
  return summarize(pairs);
}

double z_score(double a, double se_a, double b, double se_b) {
  const double se = std::sqrt(se_a * se_a + se_b * se_b);
  const double diff = std::abs(a - b);
  if (se == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / se;
}

}  // namespace roughmerton
