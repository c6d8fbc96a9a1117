#pragma once

#include <string>
#include <vector>

#include "foodchain/param_set.hpp"
#include "foodchain/rng.hpp"
#include "foodchain/tensor.hpp"

namespace foodchain {

enum class Activation { linear, relu, tanh_act };

/// Fully connected layer, batch-oriented (rows are samples). Forward takes an
/// explicit cache so one layer instance can run several passes before a
/// backward sweep (needed when the adaptation trunk is shared across domains).
class DenseLayer {
 public:
  DenseLayer() = default;
  DenseLayer(std::size_t in, std::size_t out, Activation act, Rng& rng);

  std::size_t in_size() const { return w.cols; }
  std::size_t out_size() const { return w.rows; }

  void register_params(ParamSet& ps, const std::string& prefix);

  std::vector<std::vector<double>> forward(
      const std::vector<std::vector<double>>& x) const;

  /// Accumulates parameter gradients, returns d/input. The caller supplies
  /// the forward pass's input and output (they are the cache).
  std::vector<std::vector<double>> backward(
      const std::vector<std::vector<double>>& d_out,
      const std::vector<std::vector<double>>& cached_in,
      const std::vector<std::vector<double>>& cached_out);

  Tensor w;  // (out x in)
  Tensor b;  // (out x 1)
  Activation activation = Activation::linear;
};

/// Dense stack: hidden layers ReLU, output linear by default.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::size_t input, const std::vector<std::size_t>& hidden,
      std::size_t output, Rng& rng, Activation hidden_act = Activation::relu,
      Activation output_act = Activation::linear);

  void register_params(ParamSet& ps, const std::string& prefix);
  std::size_t layer_count() const { return layers_.size(); }
  DenseLayer& layer(std::size_t i) { return layers_[i]; }

  struct Cache {
    std::vector<std::vector<std::vector<double>>> ins, outs;
  };

  std::vector<std::vector<double>> forward(
      const std::vector<std::vector<double>>& x, Cache* cache = nullptr) const;
  std::vector<std::vector<double>> backward(
      const std::vector<std::vector<double>>& d_out, const Cache& cache);

  /// Activations of the penultimate layer (latent-vector extraction point).
  std::vector<std::vector<double>> penultimate(
      const std::vector<std::vector<double>>& x) const;

  double predict_scalar(const std::vector<double>& features) const;

 private:
  std::vector<DenseLayer> layers_;
};

}  // namespace foodchain
