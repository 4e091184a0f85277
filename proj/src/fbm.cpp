#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <string>

#include "roughmerton/errors.hpp"
#include "roughmerton/models.hpp"
#include "roughmerton/parallel.hpp"
#include "roughmerton/rng.hpp"

namespace roughmerton {

FbmGenerator::FbmGenerator(double hurst, TimeGrid grid) : hurst_(hurst), grid_(grid) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("Hurst index must lie in (0, 1)");
  const std::size_t n = grid_.n_steps();
  if (n > kMaxSteps) {
    throw DomainError("exact fBm supports at most " + std::to_string(kMaxSteps) +
                      " steps; use a coarser grid");
  }
  const double two_h = 2.0 * hurst_;
  Eigen::MatrixXd cov(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    const double t = grid_.node(a + 1);
    for (std::size_t b = 0; b <= a; ++b) {
      const double s = grid_.node(b + 1);
      const double c = 0.5 * (std::pow(t, two_h) + std::pow(s, two_h) -
                              std::pow(std::abs(t - s), two_h));
      cov(a, b) = c;
      cov(b, a) = c;
    }
    cov(a, a) += 1e-12;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("fBm covariance factorisation failed; use a smaller grid");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  lower_.resize(n * (n + 1) / 2);
  std::size_t k = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b <= a; ++b) lower_[k++] = l(a, b);
  }
}

void FbmGenerator::sample(std::uint64_t seed, std::uint64_t path, std::span<double> out) const {
  const std::size_t n = grid_.n_steps();
  if (out.size() != n + 1) throw DomainError("fBm output length mismatch");
  NormalSource normal(seed, path, static_cast<std::uint64_t>(Stream::Fbm), false);
  std::vector<double> z(n);
  for (double& x : z) x = normal();
  out[0] = 0.0;
  std::size_t k = 0;
  for (std::size_t a = 0; a < n; ++a) {
    double acc = 0.0;
    for (std::size_t b = 0; b <= a; ++b) acc += lower_[k++] * z[b];
    out[a + 1] = acc;
  }
}

std::vector<double> simulate_fbm(double hurst, const TimeGrid& grid, std::size_t n_paths,
                                 std::uint64_t seed) {
  const FbmGenerator gen(hurst, grid);
  const std::size_t nodes = grid.n_nodes();
  std::vector<double> out(n_paths * nodes);
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) gen.sample(seed, p, {out.data() + p * nodes, nodes});
  });
  return out;
}

}  // namespace roughmerton
