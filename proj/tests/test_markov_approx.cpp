#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "roughmerton/distortion.hpp"
#include "roughmerton/errors.hpp"
#include "roughmerton/markov_approx.hpp"
#include "roughmerton/statistics.hpp"

using namespace roughmerton;

namespace {

template <typename F>
double quad(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 8, 1e-13);
}

MarketParams rho0_market() {
  MarketParams m;
  m.r = RateCurve(0.02);
  m.theta = 1.0;
  return m;
}

}  // namespace

TEST_CASE("mixing density") {
  CHECK(mu_tilde_density(-0.75, 1.0) == doctest::Approx(std::sin(0.25 * std::numbers::pi) / std::numbers::pi));
  CHECK(std::abs(mu_tilde_density(-0.75, 1.0) - 0.2250790790) < 1e-10);
  CHECK(mu_tilde_density(-0.75, 1e-300) < 1e-70);
  for (double x : {0.01, 1.0, 37.0}) {
    CHECK(mu_tilde_density(-0.6, 2.0 * x) / mu_tilde_density(-0.6, x) ==
          doctest::Approx(std::pow(2.0, 0.4)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(mu_tilde_density(-0.4, 1.0), DomainError);
  CHECK_THROWS_AS(mu_tilde_density(-0.75, 0.0), DomainError);
}

TEST_CASE("single cell quantization") {
  const auto q = build_quantization(-0.75, std::vector<double>{1.0, 2.0});
  REQUIRE(q.n() == 1);
  const double x = ((std::pow(2.0, 2.25) - 1.0) / 2.25) / ((std::pow(2.0, 1.25) - 1.0) / 1.25);
  CHECK(q.atoms[0] == doctest::Approx(x).epsilon(1e-14));
  auto dens = [](double u) { return mu_tilde_density(-0.75, u); };
  const double mass = quad(dens, 1.0, 2.0);
  CHECK(q.masses[0] == doctest::Approx(mass).epsilon(1e-12));
  CHECK(q.atoms[0] == doctest::Approx(quad([&](double u) { return u * dens(u); }, 1.0, 2.0) / mass));
}

TEST_CASE("cell masses against quadrature and barycentre placement") {
  for (auto spacing : {Spacing::Geometric, Spacing::Linear}) {
    const PartitionSpec spec{1e-3, 1e3, 30, spacing};
    const auto q = build_quantization(-0.75, spec);
    REQUIRE(q.n() == 30);
    for (std::size_t i = 0; i < q.n(); ++i) {
      const double a = q.partition[i], b = q.partition[i + 1];
      const double mass = quad([](double u) { return mu_tilde_density(-0.75, u); }, a, b);
      CHECK(std::abs(q.masses[i] - mass) < 1e-10);
      CHECK(q.masses[i] > 0.0);
      CHECK(q.atoms[i] > a);
      CHECK(q.atoms[i] < b);
    }
  }
  CHECK_THROWS_AS(build_quantization(-0.75, PartitionSpec{1.0, 0.5, 4}), DomainError);
  CHECK_THROWS_AS(build_quantization(-0.75, PartitionSpec{0.0, 1.0, 4}), DomainError);
  CHECK_THROWS_AS(build_quantization(-0.75, PartitionSpec{1.0, 2.0, 0}), DomainError);
}

TEST_CASE("nested refinement is additive") {
  const auto coarse = build_quantization(-0.75, PartitionSpec{1e-4, 1e4, 20});
  const auto fine = build_quantization(-0.75, PartitionSpec{1e-4, 1e4, 40});
  REQUIRE(is_nested(coarse.partition, fine.partition));
  CHECK_FALSE(is_nested(fine.partition, coarse.partition));
  for (std::size_t i = 0; i < coarse.n(); ++i) {
    CHECK(coarse.masses[i] ==
          doctest::Approx(fine.masses[2 * i] + fine.masses[2 * i + 1]).epsilon(1e-13));
  }
}

TEST_CASE("quantized Laplace transform") {
  const auto q400 = build_quantization(-0.75, PartitionSpec{1e-4, 1e4, 400});
  const auto one = laplace_check(q400, 1.0);
  CHECK(std::abs(one.exact - 0.2040122348) < 1e-9);  // 0.25 / Gamma(0.75)
  CHECK(one.abs_err < 1e-3);
  const auto ten = laplace_check(q400, 10.0);
  CHECK(ten.exact == doctest::Approx(one.exact * std::pow(10.0, -1.25)));
  CHECK(std::abs(ten.discrete / ten.exact - 1.0) < 0.01);
  double prev = 1e300;
  for (std::size_t n : {25u, 50u, 100u, 200u, 400u}) {
    const double err = laplace_check(build_quantization(-0.75, PartitionSpec{1e-4, 1e4, n}), 1.0).abs_err;
    CHECK(err <= prev);
    prev = err;
  }
}

TEST_CASE("factor loadings are bounded on every atom and node") {
  const auto q = build_quantization(-0.75, PartitionSpec{});
  const TimeGrid grid = TimeGrid::with_steps(1.0, 100);
  for (double x : q.atoms) {
    for (std::size_t j = 1; j < grid.n_nodes(); ++j) {
      const double t = grid.node(j);
      const double h = factor_loading(x, t);
      CHECK(h > 0.0);
      // e^{-tx} underflows for the largest atoms, where h rounds to 1/x
      if (t * x < 30.0) {
        CHECK(h < std::min(t, 1.0 / x));
      } else {
        CHECK(h <= 1.0 / x);
      }
    }
  }
}

TEST_CASE("assembled volatility edge cases") {
  const TimeGrid grid = TimeGrid::with_steps(1.0, 50);
  MarchaudParams p;
  p.z0 = 0.0;
  p.sigma = 0.0;
  p.phi_mean = 0.0;
  const auto q = build_quantization(p.alpha_m, PartitionSpec{1e-2, 1e2, 8});
  const auto b = simulate_marchaud_factors(p, q, 0.0, grid, 3, {1, false});
  const auto flat = assemble_approx_vol(p, q, *b.z, *b.y_factors, grid);
  for (double v : flat.nu) CHECK(v == p.nu0);

  // no atoms: only the Z term
  MarchaudParams p2;
  Quantization empty;
  empty.alpha_m = p2.alpha_m;
  const auto b2 = simulate_marchaud_factors(p2, empty, 0.0, grid, 2, {4, false});
  const auto bare = assemble_approx_vol(p2, empty, *b2.z, {}, grid);
  for (std::size_t path = 0; path < 2; ++path) {
    for (std::size_t j = 1; j < grid.n_nodes(); ++j) {
      const double t = grid.node(j);
      const double expected =
          p2.nu0 + (*b2.z)[path * grid.n_nodes() + j] * std::pow(t, -p2.alpha_m - 1.0) /
                       std::tgamma(-p2.alpha_m);
      CHECK(bare.nu[path * grid.n_nodes() + j] == doctest::Approx(expected).epsilon(1e-14));
    }
    CHECK(bare.nu[path * grid.n_nodes()] == bare.nu[path * grid.n_nodes() + 1]);
  }
  CHECK_THROWS_AS(assemble_approx_vol(p2, q, *b2.z, {}, grid), DomainError);
}

TEST_CASE("assembled volatility for a deterministic factor") {
  // sigma = 0: Z follows the Euler recursion, linear between nodes. Y is
  // recomputed cell by cell as int h(s) e^{-x(t-s)} Z'(s) ds by quadrature.
  const TimeGrid grid = TimeGrid::with_steps(1.0, 40);
  MarchaudParams p;
  p.z0 = 0.12;
  p.sigma = 0.0;
  const auto q = build_quantization(p.alpha_m, PartitionSpec{1e-2, 1e2, 6});
  const auto b = simulate_marchaud_factors(p, q, 0.0, grid, 1, {0, false});
  const auto vol = assemble_approx_vol(p, q, *b.z, *b.y_factors, grid);
  const auto& z = *b.z;
  const double dt = grid.dt();
  const std::size_t last = grid.n_steps();
  double sum = 0.0;
  for (std::size_t i = 0; i < q.n(); ++i) {
    const double x = q.atoms[i];
    double y = 0.0;
    for (std::size_t j = 0; j < last; ++j) {
      const double slope = (z[j + 1] - z[j]) / dt;
      y += slope * quad([&](double s) { return factor_loading(x, s) * std::exp(-x * (1.0 - s)); },
                        grid.node(j), grid.node(j + 1));
    }
    sum += q.masses[i] * y;
  }
  const double expected = p.nu0 + z[last] / std::tgamma(0.75) + sum;
  CHECK(vol.nu[last] == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("Feynman-Kac value in degenerate settings") {
  const TimeGrid grid = TimeGrid::with_steps(1.0, 50);
  const auto q = build_quantization(-0.75, PartitionSpec{1e-4, 1e4, 20});
  MarchaudParams p;
  auto m = rho0_market();
  m.theta = 0.0;
  m.w0 = 2.0;
  const auto bond = feynman_kac_value(p, m, q, grid, 64, {3, false});
  CHECK(bond.estimate == doctest::Approx(std::sqrt(2.0) / 0.5 * std::exp(0.01)).epsilon(1e-14));
  CHECK(bond.std_err == 0.0);
  CHECK(bond.n == 20);
  CHECK(bond.n_paths == 64);

  m.theta = 1.0;
  p.sigma = 0.0;
  p.z0 = p.phi_mean;
  const auto det = feynman_kac_value(p, m, q, grid, 16, {3, false});
  CHECK(det.std_err < 1e-12 * det.estimate);

  m.rho = 0.3;
  CHECK_THROWS_AS(feynman_kac_value(p, m, q, grid, 16, {3, false}), DomainError);
  CHECK_THROWS_AS(optimal_strategy_rho0(m, grid), DomainError);
}

TEST_CASE("Feynman-Kac reduction is order independent") {
  const TimeGrid grid = TimeGrid::with_steps(1.0, 50);
  const auto q = build_quantization(-0.75, PartitionSpec{1e-4, 1e4, 20});
  auto xs = feynman_kac_samples(MarchaudParams{}, rho0_market(), q, grid, 500, {8, false});
  const double a = compensated_sum(xs);
  std::shuffle(xs.begin(), xs.end(), std::mt19937_64(42));
  const double b = compensated_sum(xs);
  CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
}

TEST_CASE("convergence study") {
  const TimeGrid grid = TimeGrid::with_steps(1.0, 50);
  const MarchaudParams p;
  const auto m = rho0_market();
  const std::vector<PartitionSpec> specs{{1e-4, 1e4, 10}, {1e-4, 1e4, 20}, {1e-4, 1e4, 40}};
  const auto table = convergence_study(p, m, specs, grid, 1000, {5, false});
  REQUIRE(table.rows.size() == 3);
  CHECK(table.nondecreasing);
  for (std::size_t i = 1; i < 3; ++i) {
    CHECK(table.rows[i].diff == doctest::Approx(table.rows[i].value.estimate - table.rows[i - 1].value.estimate));
    CHECK(table.rows[i].diff >= -table.rows[i].combined_se);
  }

  const auto same = convergence_study(p, m, {specs[1], specs[1]}, grid, 200, {5, false});
  CHECK(same.rows[0].value.estimate == same.rows[1].value.estimate);
  CHECK(same.rows[1].diff == 0.0);

  auto flat_m = m;
  flat_m.theta = 0.0;
  const auto flat = convergence_study(p, flat_m, specs, grid, 100, {5, false});
  CHECK(flat.rows[0].value.estimate == flat.rows[2].value.estimate);

  CHECK_THROWS_AS(convergence_study(p, m, {{1e-4, 1e4, 20}, {1e-4, 1e4, 30}}, grid, 10, {5, false}),
                  DomainError);
}

TEST_CASE("optimal strategy without correlation") {
  const TimeGrid grid = TimeGrid::with_steps(1.0, 64);
  auto m = rho0_market();
  for (double pi : optimal_strategy_rho0(m, grid).pi) CHECK(pi == 2.0);
  m.theta = -0.5;
  for (double pi : optimal_strategy_rho0(m, grid).pi) CHECK(pi == -1.0);

  m.theta = 1.0;
  VolterraHestonParams h;
  h.kernel = KernelSpec::fractional(1.0, 0.6);
  const auto s = solve_distortion(m, h, grid);
  const auto rho0 = optimal_strategy_rho0(m, grid);
  for (std::size_t j = 0; j < grid.n_nodes(); ++j) CHECK(rho0.pi[j] == s.pi_star(grid.node(j)));
}

TEST_CASE("classical Heston Feynman-Kac route") {
  const TimeGrid grid = TimeGrid::with_steps(1.0, 50);
  auto m = rho0_market();
  m.theta = 0.0;
  VolterraHestonParams h;
  const auto bond = heston_feynman_kac_value(h, m, grid, 32, {2, false});
  CHECK(bond.estimate == doctest::Approx(1.0 / 0.5 * std::exp(0.01)).epsilon(1e-14));
  CHECK(bond.std_err == 0.0);

  m.theta = 1.0;
  const auto v = heston_feynman_kac_value(h, m, grid, 4000, {2, false});
  const auto s = solve_distortion(m, h, grid);
  CHECK(std::abs(v.estimate - s.j0) < 4.0 * v.std_err + 1e-4);
}
