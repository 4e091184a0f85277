#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "roughmerton/errors.hpp"
#include "roughmerton/models.hpp"
#include "roughmerton/rng.hpp"
#include "roughmerton/roughness.hpp"

using namespace roughmerton;

namespace {
const std::vector<double> kQs{0.5, 1.0, 1.5, 2.0, 3.0};
const std::vector<std::size_t> kLags{1, 2, 3, 4, 5, 10, 20};
}  // namespace

TEST_CASE("exact power law is recovered") {
  std::vector<double> m;
  for (double q : kQs) {
    for (auto lag : kLags) m.push_back(std::exp(0.3 * q) * std::pow(static_cast<double>(lag), 0.4 * q));
  }
  const auto r = fit_scaling(kQs, kLags, m);
  CHECK(std::abs(r.H_hat - 0.4) < 1e-12);
  CHECK(r.r2_h == doctest::Approx(1.0));
  for (std::size_t i = 0; i < kQs.size(); ++i) {
    CHECK(r.zeta_q[i] == doctest::Approx(0.4 * kQs[i]));
    CHECK(r.log_k_q[i] == doctest::Approx(0.3 * kQs[i]));
    CHECK(r.r2[i] == doctest::Approx(1.0));
    CHECK(r.fitted(i, 3) == doctest::Approx(r.m(i, 3)));
  }
}

TEST_CASE("q-variation of an alternating series") {
  const std::vector<double> x{0, 1, 0, 1, 0, 1};
  CHECK(q_variation(x, 2.0, 1) == 1.0);
  CHECK(q_variation(x, 0.5, 3) == 1.0);
  CHECK(q_variation(x, 1.0, 2) == 0.0);
  const std::vector<double> y{0.0, 2.0, 3.0};
  CHECK(q_variation(y, 2.0, 1) == doctest::Approx(2.5));
  CHECK(q_variation(y, 1.0, 2) == doctest::Approx(3.0));
  // pooling weights every increment equally
  const std::vector<double> z{0.0, 4.0};
  CHECK(q_variation({std::span<const double>(y), std::span<const double>(z)}, 1.0, 1) ==
        doctest::Approx(7.0 / 3.0));
  CHECK_THROWS_AS(q_variation(y, 1.0, 3), DomainError);
  CHECK_THROWS_AS(q_variation(y, 0.0, 1), DomainError);
  // zero increments at even lags make the regression degenerate
  CHECK_THROWS_AS(estimate_hurst(x, {1.0, 2.0}, {1, 2, 3}), DomainError);
}

TEST_CASE("degenerate inputs") {
  const std::vector<double> flat(100, 2.5);
  CHECK_THROWS_AS(estimate_hurst(flat, kQs, kLags), DomainError);
  std::vector<double> x(100);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.1 * i);
  CHECK_THROWS_AS(estimate_hurst(x, {1.0}, kLags), DomainError);
  CHECK_THROWS_AS(estimate_hurst(x, kQs, {1, 2}), DomainError);
}

TEST_CASE("affine invariance") {
  std::vector<double> x(2000);
  PathRng rng(3, 0);
  double acc = 0.0;
  for (double& v : x) v = (acc += rng.normal());
  const auto base = estimate_hurst(x, kQs, kLags);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = -3.0 * x[i] + 11.0;
  const auto moved = estimate_hurst(y, kQs, kLags);
  CHECK(moved.H_hat == doctest::Approx(base.H_hat).epsilon(1e-10));
  for (std::size_t i = 0; i < kQs.size(); ++i) {
    CHECK(moved.zeta_q[i] == doctest::Approx(base.zeta_q[i]).epsilon(1e-10));
    CHECK(moved.log_k_q[i] == doctest::Approx(base.log_k_q[i] + kQs[i] * std::log(3.0)));
  }
}

TEST_CASE("Brownian motion has Hurst index one half") {
  std::vector<double> x(20000);
  PathRng rng(8, 0);
  double acc = 0.0;
  for (double& v : x) v = (acc += rng.normal());
  const auto r = estimate_hurst(x, kQs, kLags);
  CHECK(std::abs(r.H_hat - 0.5) < 0.03);
  CHECK(r.r2_h > 0.99);
}

TEST_CASE("rough fBm is detected") {
  const TimeGrid grid(1.0 / 1024.0, 1024);
  const std::size_t n = 8;
  const auto paths = simulate_fbm(0.15, grid, n, 5);
  std::vector<std::span<const double>> rows;
  for (std::size_t p = 0; p < n; ++p) rows.emplace_back(paths.data() + p * grid.n_nodes(), grid.n_nodes());
  const auto r = estimate_hurst(rows, kQs, kLags);
  CHECK(std::abs(r.H_hat - 0.15) < 0.03);
}
