#pragma once

#include <cstdint>
#include <random>

#include "iterblue/matrix.hpp"

namespace iterblue {

/// Deterministic standard-normal stream: Box-Muller over mt19937_64.
/// The transform is spelled out here (rather than std::normal_distribution)
/// so streams are bit-stable across standard library implementations.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

  double next();
  Vector vector(std::size_t n);

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Stream seed for one Monte Carlo trial: master ^ hash(sigma, trial).
/// Depends on the sigma value, not its grid position, so extending a grid
/// leaves existing cells untouched.
std::uint64_t trial_seed(std::uint64_t master, double sigma,
                         std::uint64_t trial);

}  // namespace iterblue
