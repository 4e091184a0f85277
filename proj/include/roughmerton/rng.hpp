#pragma once

#include <cstdint>

namespace roughmerton {

/// splitmix64 finaliser; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// xoshiro256** with a standard-normal sampler (Marsaglia polar method).
///
/// Each (seed, path, stream) triple gets its own generator, so the numbers a
/// path sees do not depend on which thread simulated it or in which order.
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t path, std::uint64_t stream = 0) noexcept;

  std::uint64_t next() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  double normal() noexcept;

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Normal draws for one path, negated for the antithetic partner.
///
/// With antithetic sampling, paths 2k and 2k+1 share the generator of pair k
/// and path 2k+1 sees the negated draws.
class NormalSource {
 public:
  NormalSource(std::uint64_t seed, std::uint64_t path, std::uint64_t stream, bool antithetic) noexcept
      : rng_(seed, antithetic ? path / 2 : path, stream),
        sign_(antithetic && (path % 2 == 1) ? -1.0 : 1.0) {}

  double operator()() noexcept { return sign_ * rng_.normal(); }

 private:
  PathRng rng_;
  double sign_;
};

}  // namespace roughmerton
