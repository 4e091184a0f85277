#include "roughmerton/rng.hpp"

#include <cmath>

namespace roughmerton {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

PathRng::PathRng(std::uint64_t seed, std::uint64_t path, std::uint64_t stream) noexcept {
  std::uint64_t key = splitmix64(seed);
  key = splitmix64(key ^ splitmix64(path + 0x632be59bd9b4e019ULL));
  key = splitmix64(key ^ splitmix64(stream + 0x8cb92ba72f3d8dd7ULL));
  for (auto& word : s_) {
    key = splitmix64(key);
    word = key;
  }
}

std::uint64_t PathRng::next() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double PathRng::uniform() noexcept {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double PathRng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

}  // namespace roughmerton
