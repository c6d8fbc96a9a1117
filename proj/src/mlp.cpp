#include "foodchain/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace foodchain {

using Batch = std::vector<std::vector<double>>;

DenseLayer::DenseLayer(std::size_t in, std::size_t out, Activation act,
                       Rng& rng)
    : w(out, in), b(out, 1), activation(act) {
  xavier_init(w, in, out, rng);
}

void DenseLayer::register_params(ParamSet& ps, const std::string& prefix) {
  ps.add(prefix + ".w", &w);
  ps.add(prefix + ".b", &b);
}

Batch DenseLayer::forward(const Batch& x) const {
  Batch y(x.size(), std::vector<double>(w.rows));
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (x[n].size() != w.cols)
      throw std::invalid_argument("dense forward: feature size mismatch");
    affine(w, x[n].data(), b.v.data(), y[n].data());
    if (activation == Activation::relu) {
      for (double& v : y[n]) v = v > 0.0 ? v : 0.0;
    } else if (activation == Activation::tanh_act) {
      for (double& v : y[n]) v = std::tanh(v);
    }
  }
  return y;
}

Batch DenseLayer::backward(const Batch& d_out, const Batch& cached_in,
                           const Batch& cached_out) {
  Batch dx(cached_in.size(), std::vector<double>(w.cols, 0.0));
  std::vector<double> da(w.rows);
  for (std::size_t n = 0; n < cached_in.size(); ++n) {
    for (std::size_t r = 0; r < w.rows; ++r) {
      double d = d_out[n][r];
      if (activation == Activation::relu) {
        d = cached_out[n][r] > 0.0 ? d : 0.0;
      } else if (activation == Activation::tanh_act) {
        d *= 1.0 - cached_out[n][r] * cached_out[n][r];
      }
      da[r] = d;
      b.g[r] += d;
    }
    affine_backward_weight(w, da.data(), cached_in[n].data());
    affine_backward_input(w, da.data(), dx[n].data());
  }
  return dx;
}

// ---------------------------------------------------------------------------

Mlp::Mlp(std::size_t input, const std::vector<std::size_t>& hidden,
         std::size_t output, Rng& rng, Activation hidden_act,
         Activation output_act) {
  std::size_t in = input;
  for (std::size_t h : hidden) {
    layers_.emplace_back(in, h, hidden_act, rng);
    in = h;
  }
  layers_.emplace_back(in, output, output_act, rng);
}

void Mlp::register_params(ParamSet& ps, const std::string& prefix) {
  for (std::size_t i = 0; i < layers_.size(); ++i)
    layers_[i].register_params(ps, prefix + ".d" + std::to_string(i));
}

Batch Mlp::forward(const Batch& x, Cache* cache) const {
  Batch cur = x;
  if (cache) {
    cache->ins.clear();
    cache->outs.clear();
  }
  for (const auto& layer : layers_) {
    Batch out = layer.forward(cur);
    if (cache) {
      cache->ins.push_back(cur);
      cache->outs.push_back(out);
    }
    cur = std::move(out);
  }
  return cur;
}

Batch Mlp::backward(const Batch& d_out, const Cache& cache) {
  Batch d = d_out;
  for (std::size_t i = layers_.size(); i-- > 0;)
    d = layers_[i].backward(d, cache.ins[i], cache.outs[i]);
  return d;
}

Batch Mlp::penultimate(const Batch& x) const {
  if (layers_.size() < 2)
    throw std::logic_error("penultimate layer requires depth >= 2");
  Batch cur = x;
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i)
    cur = layers_[i].forward(cur);
  return cur;
}

double Mlp::predict_scalar(const std::vector<double>& features) const {
  Batch out = forward({features});
  if (out[0].size() != 1)
    throw std::logic_error("predict_scalar on non-scalar head");
  return out[0][0];
}

}  // namespace foodchain
