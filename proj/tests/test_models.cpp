#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "roughmerton/errors.hpp"
#include "roughmerton/models.hpp"
#include "roughmerton/parallel.hpp"
#include "roughmerton/rng.hpp"
#include "roughmerton/statistics.hpp"

using namespace roughmerton;

TEST_CASE("rng streams are reproducible and distinct") {
  PathRng a(7, 3, 1), b(7, 3, 1), c(7, 4, 1), d(7, 3, 2);
  bool differs_path = false, differs_stream = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    differs_path |= x != c.next();
    differs_stream |= x != d.next();
  }
  CHECK(differs_path);
  CHECK(differs_stream);
}

TEST_CASE("normal draws have unit moments") {
  PathRng rng(11, 0);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
  }
  CHECK(std::abs(s1 / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("antithetic partners see negated draws") {
  NormalSource p0(5, 6, 1, true), p1(5, 7, 1, true);
  for (int i = 0; i < 10; ++i) CHECK(p0() == -p1());
  const TimeGrid grid(0.01, 50);
  BrownianIncrements a, b;
  draw_increments(grid, -0.5, {5, true}, 2, a);
  draw_increments(grid, -0.5, {5, true}, 3, b);
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    CHECK(a.dw1[k] == -b.dw1[k]);
    CHECK(a.db[k] == doctest::Approx(-b.db[k]).epsilon(1e-14));
  }
}

TEST_CASE("correlated increments") {
  const TimeGrid grid(1.0 / 16.0, 16);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  BrownianIncrements inc;
  for (std::uint64_t p = 0; p < 20000; ++p) {
    draw_increments(grid, -0.7, {3, false}, p, inc);
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
      sxy += inc.dw1[k] * inc.db[k];
      sxx += inc.dw1[k] * inc.dw1[k];
      syy += inc.db[k] * inc.db[k];
    }
  }
  CHECK(sxy / std::sqrt(sxx * syy) == doctest::Approx(-0.7).epsilon(0.01));
  CHECK(sxx / (20000.0 * 16.0) == doctest::Approx(grid.dt()).epsilon(0.01));
}

TEST_CASE("rate curve") {
  const RateCurve flat(0.03);
  CHECK(flat.is_constant());
  CHECK(flat.at(7.0) == 0.03);
  const RateCurve r({0.0, 1.0}, {0.01, 0.03});
  CHECK(r.at(0.5) == doctest::Approx(0.02));
  CHECK(r.at(-1.0) == 0.01);
  CHECK(r.at(2.0) == 0.03);
  CHECK_THROWS_AS(RateCurve({1.0, 0.5}, {0.0, 0.0}), DomainError);
}

TEST_CASE("parameter validation") {
  MarketParams m;
  m.gamma_ra = 1.0;
  CHECK_THROWS_AS(m.validate(), DomainError);
  m.gamma_ra = 0.5;
  m.rho = 1.0;
  CHECK_THROWS_AS(m.validate(), DomainError);
  VolterraHestonParams h;
  h.kappa = 0.0;
  CHECK_THROWS_AS(h.validate(), DomainError);
  h.kappa = 2.0;
  h.kernel = KernelSpec::fractional(1.0, 0.4);
  CHECK_THROWS_AS(h.validate(), DomainError);
}

TEST_CASE("CIR without noise follows the Euler recursion and its mean") {
  const TimeGrid grid(1.0 / 256.0, 256);
  CirParams p{0.1, 2.0, 0.04, 0.0};
  std::vector<double> db(grid.n_steps(), 0.5), z(grid.n_nodes());
  cir_path(p, grid.dt(), db, z);
  CHECK(z.back() == doctest::Approx(0.04 + 0.06 * std::pow(1.0 - 2.0 / 256.0, 256.0)));
  CHECK(std::abs(z.back() - (0.04 + 0.06 * std::exp(-2.0))) < 1e-3);

  p.sigma = 0.3;
  const std::size_t n = 20000;
  const auto paths = simulate_cir(p, grid, n, {9, false});
  std::vector<double> terminal(n);
  for (std::size_t i = 0; i < n; ++i) {
    terminal[i] = paths[i * grid.n_nodes() + grid.n_steps()];
    REQUIRE(terminal[i] >= 0.0);
  }
  const auto s = summarize(terminal);
  CHECK(std::abs(s.mean - (0.04 + 0.06 * std::exp(-2.0))) < 4.0 * s.std_err + 1e-4);
}

TEST_CASE("deterministic Volterra variance") {
  MarketParams m;
  SUBCASE("constant kernel") {
    VolterraHestonParams h{0.1, 2.0, 0.04, 0.0, KernelSpec::constant(1.0)};
    const TimeGrid grid(1.0 / 512.0, 512);
    HestonPath path;
    VolterraHestonSimulator(h, m, grid, {}).simulate(0, path);
    for (std::size_t j = 0; j < grid.n_nodes(); j += 64) {
      CHECK(std::abs(path.v[j] - (0.04 + 0.06 * std::exp(-2.0 * grid.node(j)))) < 5e-4);
    }
  }
  SUBCASE("fractional kernel against Mittag-Leffler relaxation") {
    VolterraHestonParams h{0.1, 1.0, 0.04, 0.0, KernelSpec::fractional(1.0, 0.7)};
    const TimeGrid grid(1.0 / 512.0, 512);
    HestonPath path;
    VolterraHestonSimulator(h, m, grid, {}).simulate(0, path);
    for (std::size_t j = 64; j < grid.n_nodes(); j += 64) {
      const double exact = 0.04 + 0.06 * mittag_leffler(0.7, 1.0, -std::pow(grid.node(j), 0.7));
      CHECK(std::abs(path.v[j] - exact) < 2e-3);
    }
  }
}

TEST_CASE("mean variance of the classical simulator") {
  VolterraHestonParams h;
  h.v0 = 0.06;
  MarketParams m;
  m.rho = -0.5;
  const TimeGrid grid(1.0 / 128.0, 128);
  const std::size_t n = 20000;
  const auto v = variance_samples(VolterraHestonSimulator(h, m, grid, {21, false}), {128}, n);
  const auto s = summarize(v);
  CHECK(std::abs(s.mean - (0.04 + 0.02 * std::exp(-2.0))) < 4.0 * s.std_err + 2e-4);
}

TEST_CASE("wealth recursion") {
  MarketParams m;
  m.r = RateCurve(0.05);
  m.theta = 1.0;
  m.w0 = 2.0;
  const TimeGrid grid(0.5, 2);
  const std::vector<double> v{0.04, 0.09, 0.01};
  const std::vector<double> dw1{0.1, -0.2};
  const auto zero = StrategySchedule::constant(grid, 0.0);
  CHECK(log_wealth_path(m, grid, v, dw1, zero) == doctest::Approx(std::log(2.0) + 0.05));
  const StrategySchedule s{grid, {1.0, 2.0, 0.0}};
  std::vector<double> lw(3);
  const double x = log_wealth_path(m, grid, v, dw1, s, lw);
  const double step1 = (0.05 + 0.04 - 0.02) * 0.5 + 0.2 * 0.1;
  const double step2 = (0.05 + 0.18 - 0.18) * 0.5 + 2.0 * 0.3 * -0.2;
  CHECK(lw[1] == doctest::Approx(std::log(2.0) + step1));
  CHECK(x == doctest::Approx(std::log(2.0) + step1 + step2));
  const StrategySchedule short_s{TimeGrid(0.5, 1), {1.0, 1.0}};
  CHECK_THROWS_AS(log_wealth_path(m, grid, v, dw1, short_s), DomainError);
}

TEST_CASE("utility samples under the zero strategy are deterministic") {
  MarketParams m;
  m.r = RateCurve(0.02);
  m.w0 = 3.0;
  const TimeGrid grid(1.0 / 32.0, 32);
  const VolterraHestonSimulator sim(VolterraHestonParams{}, m, grid, {1, false});
  const auto u = utility_samples(sim, {StrategySchedule::constant(grid, 0.0)}, 8);
  for (double x : u[0]) CHECK(x == doctest::Approx(std::pow(3.0, 0.5) / 0.5 * std::exp(0.01)));
  for (double x : exp_integral_samples(sim, 0.0, 4)) CHECK(x == 1.0);
}

TEST_CASE("path bundles do not depend on the thread count") {
  VolterraHestonParams h;
  h.kernel = KernelSpec::fractional(1.0, 0.6);
  MarketParams m;
  m.rho = -0.5;
  const TimeGrid grid(1.0 / 64.0, 64);
  set_thread_count(1);
  const auto a = simulate_volterra_heston(h, m, grid, 37, {4, true});
  set_thread_count(3);
  const auto b = simulate_volterra_heston(h, m, grid, 37, {4, true});
  set_thread_count(1);
  CHECK(a.v == b.v);
  CHECK(a.s == b.s);
  CHECK(a.w1 == b.w1);
}

TEST_CASE("fBm covariance") {
  const double H = 0.3;
  const TimeGrid grid(1.0 / 16.0, 16);
  const std::size_t n = 20000;
  const auto paths = simulate_fbm(H, grid, n, 17);
  const std::size_t w = grid.n_nodes();
  auto cov = [&](double t, double s) {
    return 0.5 * (std::pow(t, 2 * H) + std::pow(s, 2 * H) - std::pow(std::abs(t - s), 2 * H));
  };
  for (auto [i, j] : {std::pair<std::size_t, std::size_t>{4, 4}, {4, 16}, {15, 16}, {1, 16}}) {
    double acc = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      CHECK(paths[p * w] == 0.0);
      acc += paths[p * w + i] * paths[p * w + j];
    }
    const double expected = cov(grid.node(i), grid.node(j));
    CHECK(std::abs(acc / n - expected) < 5.0 * std::sqrt(2.0 / n) * std::max(expected, 0.3));
  }
  CHECK_THROWS_AS(FbmGenerator(1.0, grid), DomainError);
  CHECK_THROWS_AS(FbmGenerator(0.5, TimeGrid(1e-4, 5000)), DomainError);
}

TEST_CASE("factor loading and Y recursion") {
  CHECK(factor_loading(0.0, 0.7) == 0.7);
  CHECK(factor_loading(1e-12, 0.7) == doctest::Approx(0.7));
  CHECK(factor_loading(2.0, 0.5) == doctest::Approx((1.0 - std::exp(-1.0)) / 2.0));

  // For Z(t) = t the recursion is exact:
  // Y_t = int_0^t h(s) e^{-x(t-s)} ds = ((1 - e^{-xt})/x - t e^{-xt}) / x.
  const TimeGrid grid(1.0 / 20.0, 20);
  const auto z = grid.nodes();
  std::vector<double> y(grid.n_nodes());
  for (double x : {1e-3, 0.5, 3.0, 200.0}) {
    y_factor_path(x, grid, z, y);
    for (std::size_t j = 0; j < grid.n_nodes(); ++j) {
      const double t = grid.node(j);
      const double exact = ((-std::expm1(-x * t)) / x - t * std::exp(-x * t)) / x;
      CHECK(std::abs(y[j] - exact) < 1e-12 * std::max(1.0, std::abs(exact)));
    }
  }
  std::vector<double> bad(3);
  CHECK_THROWS_AS(y_factor_path(1.0, grid, z, bad), DomainError);
}
