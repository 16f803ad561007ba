#include "iterblue/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace iterblue {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double NormalSampler::next() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  // u1 in (0, 1], u2 in [0, 1); 53-bit mantissas
  const double u1 =
      (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(angle);
  has_cached_ = true;
  return r * std::cos(angle);
}

Vector NormalSampler::vector(std::size_t n) {
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = next();
  return out;
}

std::uint64_t trial_seed(std::uint64_t master, double sigma,
                         std::uint64_t trial) {
  std::uint64_t h = splitmix64(std::bit_cast<std::uint64_t>(sigma));
  h ^= trial + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return master ^ splitmix64(h);
}

}  // namespace iterblue
