#pragma once

#include <cstdint>
#include <functional>

#include "foodchain/param_set.hpp"

namespace foodchain {

struct SgdConfig {
  double learning_rate = 0.001;
  std::size_t batch_size = 32;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  double clip_norm = 5.0;  // global gradient-norm clip, <=0 disables

  void validate() const;
};

/// One plain SGD update: p <- p - lr * grad(p), gradients zeroed afterwards.
/// Gradients are clipped to clip_norm (global L2) before the update.
/// Throws if any gradient entry is non-finite, naming the parameter.
void sgd_step(ParamSet& params, const SgdConfig& config);

/// Central-difference gradient verification.
///
/// `loss_eval` evaluates the scalar loss at the current parameter values
/// without touching gradients; `compute_grads` zeroes the gradients and runs
/// the analytic backward pass. Returns the max over sampled coordinates of
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8). At most
/// `max_coords_per_tensor` coordinates per tensor are sampled (seeded).
double grad_check(const std::function<double()>& loss_eval,
                  const std::function<void()>& compute_grads,
                  ParamSet& params, double epsilon = 1e-5,
                  std::size_t max_coords_per_tensor = 24,
                  std::uint64_t seed = 0);

}  // namespace foodchain
