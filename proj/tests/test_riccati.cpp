#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "roughmerton/errors.hpp"
#include "roughmerton/models.hpp"
#include "roughmerton/riccati.hpp"

using namespace roughmerton;

namespace {

// Dense RK4 for the scalar ODE f' = c0 + c1 f + c2 f^2 and the running
// integral of f.
struct OdeResult {
  double f;
  double int_f;
};

OdeResult rk4(const RiccatiCoefficients& c, double T, int n) {
  const double h = T / n;
  double f = 0.0;
  double acc = 0.0;
  auto d = [&](double x) { return c.c0 + c.c1 * x + c.c2 * x * x; };
  for (int i = 0; i < n; ++i) {
    const double k1 = d(f);
    const double k2 = d(f + 0.5 * h * k1);
    const double k3 = d(f + 0.5 * h * k2);
    const double k4 = d(f + h * k3);
    // Simpson on the stage values for the integral of f.
    const double mid = f + 0.5 * h * (k1 + k2) / 2.0;
    const double next = f + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    acc += h / 6.0 * (f + 4.0 * mid + next);
    f = next;
  }
  return {f, acc};
}

// Product-trapezoid solution of the fractional equation (1, -2, 0.5) at t = 1
// from an independent implicit solver at dt = 1e-4, extrapolated.
constexpr double kFractionalOracle = 0.41064478;

}  // namespace

TEST_CASE("zero coefficients give the zero curve") {
  for (const auto& k : {KernelSpec::constant(1.0), KernelSpec::fractional(1.0, 0.6),
                        KernelSpec::gamma(2.0, 0.7, 1.0)}) {
    const auto sol = solve_riccati(k, {0.0, 0.0, 0.0}, TimeGrid(1.0 / 64.0, 64));
    for (double v : sol.values) CHECK(v == 0.0);
    CHECK(riccati_residual(sol) == 0.0);
  }
}

TEST_CASE("linear constant-kernel case") {
  const TimeGrid grid(1.0 / 128.0, 128);
  const auto sol = solve_riccati(KernelSpec::constant(1.0), {1.0, -1.0, 0.0}, grid);
  CHECK(sol.values.back() == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-4));
  const auto sol2 = solve_riccati(KernelSpec::constant(1.0), {0.6, -2.0, 0.0}, grid);
  for (std::size_t j = 0; j < grid.n_nodes(); ++j) {
    CHECK(std::abs(sol2.values[j] - 0.3 * (1.0 - std::exp(-2.0 * grid.node(j)))) <= 10.0 * grid.dt());
  }
  CHECK(sol.values[0] == 0.0);
}

TEST_CASE("fractional solution against a dense independent solve") {
  const auto k = KernelSpec::fractional(1.0, 0.6);
  const auto sol = solve_riccati(k, {1.0, -2.0, 0.5}, TimeGrid(1.0 / 512.0, 512));
  CHECK(std::abs(sol.values.back() - kFractionalOracle) <= 1e-4);
  CHECK(riccati_residual(sol) <= riccati_tolerance(k, sol.grid.dt()));
}

TEST_CASE("classical limit against RK4 with first-order convergence or better") {
  // Distortion coefficients for gamma = 0.5, theta = 1, rho = -0.5, kappa = 2, sigma = 0.3.
  const RiccatiCoefficients c{0.625, -2.15, 0.045};
  const double oracle = rk4(c, 1.0, 100000).f;
  double prev = 0.0;
  for (std::size_t n : {128u, 256u, 512u}) {
    const auto sol = solve_riccati(KernelSpec::constant(1.0), c, TimeGrid(1.0 / n, n));
    const double err = std::abs(sol.values.back() - oracle);
    if (n == 512) CHECK(err <= 1e-3);
    if (prev > 0.0) CHECK(std::log2(prev / err) >= 1.0);
    prev = err;
  }
}

TEST_CASE("refinement for smooth kernels") {
  for (const auto& k : {KernelSpec::constant(1.0), KernelSpec::exponential(1.0, 0.7)}) {
    const RiccatiCoefficients c{1.0, -2.0, 0.5};
    double prev_diff = 0.0;
    double prev_val = solve_riccati(k, c, TimeGrid(1.0 / 32.0, 32)).values.back();
    for (std::size_t n : {64u, 128u, 256u}) {
      const double v = solve_riccati(k, c, TimeGrid(1.0 / n, n)).values.back();
      const double diff = std::abs(v - prev_val);
      if (prev_diff > 0.0) CHECK(prev_diff / diff >= 1.8);
      prev_diff = diff;
      prev_val = v;
    }
  }
}

TEST_CASE("residual within tolerance for every kernel") {
  const RiccatiCoefficients c{0.625, -2.15, 0.045};
  for (const auto& k : {KernelSpec::constant(1.0), KernelSpec::fractional(1.0, 0.6),
                        KernelSpec::exponential(1.0, 1.0), KernelSpec::gamma(1.0, 0.6, 1.0)}) {
    for (std::size_t n : {64u, 256u}) {
      const auto sol = solve_riccati(k, c, TimeGrid(1.0 / n, n));
      CHECK(riccati_residual(sol) <= riccati_tolerance(k, sol.grid.dt()));
    }
  }
}

TEST_CASE("comparison monotonicity and sign") {
  const auto k = KernelSpec::fractional(1.0, 0.6);
  const TimeGrid grid(1.0 / 128.0, 128);
  const auto lo = solve_riccati(k, {0.3, -2.0, 0.045}, grid);
  const auto hi = solve_riccati(k, {0.6, -2.0, 0.045}, grid);
  for (std::size_t j = 0; j < grid.n_nodes(); ++j) {
    CHECK(lo.values[j] >= 0.0);
    CHECK(hi.values[j] >= lo.values[j]);
  }
}

TEST_CASE("blow-up is detected") {
  const auto k = KernelSpec::constant(1.0);
  // f' = 1 + f^2 explodes at pi/2.
  try {
    solve_riccati(k, {1.0, 0.0, 1.0}, TimeGrid(1.0 / 256.0, 512));
    FAIL("expected a blow-up");
  } catch (const BlowUpError& e) {
    const double t = e.last_stable_node() / 256.0;
    CHECK(t > 1.4);
    CHECK(t < 1.6);
  }
}

TEST_CASE("global existence condition") {
  CHECK(check_global_existence(2.0, 0.3, 1.0));
  CHECK_FALSE(check_global_existence(1.0, 1.0, 1.0));
  CHECK_FALSE(check_global_existence(std::sqrt(2.0) * (1.0 - 1e-16), 1.0, 1.0));
  CHECK_FALSE(check_global_existence(1.0, std::sqrt(0.5), 1.0));
}

TEST_CASE("exponential moment") {
  VolterraHestonParams h;
  h.kernel = KernelSpec::constant(1.0);
  const TimeGrid grid(1.0 / 512.0, 512);
  CHECK(exponential_moment(h, 0.0, grid) == 1.0);
  // Classical Heston Laplace transform: exp(V0 g(T) + kappa phi int g).
  const RiccatiCoefficients c{-1.0, -h.kappa, 0.5 * h.sigma * h.sigma};
  const auto ode = rk4(c, 1.0, 100000);
  const double oracle = std::exp(h.v0 * ode.f + h.kappa * h.phi_mean * ode.int_f);
  CHECK(exponential_moment(h, -1.0, grid) == doctest::Approx(oracle).epsilon(1e-6));
  h.sigma = 3.0;
  CHECK_THROWS_AS(exponential_moment(h, 1.0, grid), DomainError);
}

TEST_CASE("solution interpolation") {
  const auto sol = solve_riccati(KernelSpec::constant(1.0), {1.0, 0.0, 0.0}, TimeGrid(0.25, 4));
  CHECK(sol.at(0.125) == doctest::Approx(0.125));
  CHECK(sol.at(-1.0) == 0.0);
  CHECK(sol.at(5.0) == doctest::Approx(1.0));
}
