#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "foodchain/tensor.hpp"

namespace foodchain {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng);
}

inline double gaussian(Rng& rng, double mean = 0.0, double stddev = 1.0) {
  std::normal_distribution<double> d(mean, stddev);
  return d(rng);
}

/// Uniform Xavier/Glorot initialization in +-sqrt(6/(fan_in+fan_out)).
inline void xavier_init(Tensor& t, std::size_t fan_in, std::size_t fan_out,
                        Rng& rng) {
  double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> d(-bound, bound);
  for (double& x : t.v) x = d(rng);
}

}  // namespace foodchain
