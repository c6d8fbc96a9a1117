#include "foodchain/sgd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "foodchain/rng.hpp"

namespace foodchain {

void SgdConfig::validate() const {
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("learning_rate must be > 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
}

void sgd_step(ParamSet& params, const SgdConfig& config) {
  for (const auto& [name, t] : params.entries()) {
    for (double g : t->g) {
      if (!std::isfinite(g))
        throw std::runtime_error("non-finite gradient in parameter: " + name);
    }
  }
  double scale = 1.0;
  if (config.clip_norm > 0.0) {
    double norm = params.grad_norm();
    if (norm > config.clip_norm) scale = config.clip_norm / norm;
  }
  for (const auto& [name, t] : params.entries()) {
    for (std::size_t i = 0; i < t->v.size(); ++i)
      t->v[i] -= config.learning_rate * scale * t->g[i];
  }
  params.zero_grads();
  params.bump_step();
}

double grad_check(const std::function<double()>& loss_eval,
                  const std::function<void()>& compute_grads,
                  ParamSet& params, double epsilon,
                  std::size_t max_coords_per_tensor, std::uint64_t seed) {
  if (epsilon < 1e-6 || epsilon > 1e-3)
    throw std::invalid_argument("grad_check epsilon must be in [1e-6, 1e-3]");

  compute_grads();
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.entries().size());
  for (const auto& [name, t] : params.entries()) analytic.push_back(t->g);

  Rng rng(seed);
  double max_rel = 0.0;
  std::size_t ti = 0;
  for (const auto& [name, t] : params.entries()) {
    std::vector<std::size_t> idx(t->size());
    std::iota(idx.begin(), idx.end(), 0);
    if (idx.size() > max_coords_per_tensor) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(max_coords_per_tensor);
    }
    for (std::size_t i : idx) {
      const double saved = t->v[i];
      t->v[i] = saved + epsilon;
      double lp = loss_eval();
      t->v[i] = saved - epsilon;
      double lm = loss_eval();
      t->v[i] = saved;
      if (!std::isfinite(lp) || !std::isfinite(lm))
        throw std::runtime_error("grad_check: loss non-finite near " + name);
      double numeric = (lp - lm) / (2.0 * epsilon);
      double a = analytic[ti][i];
      // Floor the denominator at 1e-6: below that, central differences on
      // doubles cannot resolve the gradient and the comparison degenerates
      // into an absolute check against finite-difference noise.
      double rel = std::abs(a - numeric) /
                   std::max({std::abs(a), std::abs(numeric), 1e-6});
      max_rel = std::max(max_rel, rel);
    }
    ++ti;
  }
  return max_rel;
}

}  // namespace foodchain
