#pragma once

#include <string>
#include <vector>

#include "foodchain/param_set.hpp"
#include "foodchain/rng.hpp"
#include "foodchain/tensor.hpp"

namespace foodchain {

using Vec = std::vector<double>;
using Seq = std::vector<Vec>;  // time-major sequence of feature vectors

/// Hidden/cell state for one LSTM layer.
struct LstmState {
  Vec h;
  Vec c;
};

/// Vanilla LSTM layer (gates f, i, g, o; no peepholes) with a hand-derived
/// backward pass through time.
///
///   f,i,o = sigmoid(Wx x + Wh h + b),  g = tanh(...)
///   c' = f.c + i.g,  h' = o.tanh(c')
class LstmLayer {
 public:
  LstmLayer(std::size_t input_size, std::size_t hidden_size, Rng& rng);

  std::size_t input_size() const { return input_size_; }
  std::size_t hidden_size() const { return hidden_; }

  void register_params(ParamSet& ps, const std::string& prefix);

  /// One gate update without caching (inference / oracle comparisons).
  LstmState step(const Vec& x, const LstmState& state) const;

  struct Cache {
    Seq x, f, i, g, o, c, h, tanh_c;
    Vec h0, c0;
    std::size_t steps() const { return x.size(); }
  };

  /// Forward over a whole sequence; initial state defaults to zeros.
  Cache forward(const Seq& xs, const LstmState* init = nullptr) const;

  /// BPTT. d_hidden[t] is the incoming gradient on h_t (may be empty);
  /// d_last_h/d_last_c add gradient on the final state. Accumulates into
  /// parameter gradient slots and returns d/inputs; optionally fills the
  /// gradient on the initial state.
  Seq backward(const Cache& cache, const Seq& d_hidden, const Vec& d_last_h,
               const Vec& d_last_c, Vec* d_init_h = nullptr,
               Vec* d_init_c = nullptr);

  Tensor wx;  // (4H x D), gate blocks ordered f, i, g, o
  Tensor wh;  // (4H x H)
  Tensor b;   // (4H x 1), forget-gate block initialized to +1

 private:
  std::size_t input_size_;
  std::size_t hidden_;
};

/// Stacked LSTM; layer l consumes layer l-1's hidden sequence.
class LstmStack {
 public:
  LstmStack() = default;
  LstmStack(std::size_t input_size, const std::vector<std::size_t>& sizes,
            Rng& rng);

  std::size_t depth() const { return layers_.size(); }
  LstmLayer& layer(std::size_t l) { return layers_[l]; }
  const LstmLayer& layer(std::size_t l) const { return layers_[l]; }
  std::size_t top_size() const { return layers_.back().hidden_size(); }

  void register_params(ParamSet& ps, const std::string& prefix);

  struct Cache {
    std::vector<LstmLayer::Cache> per_layer;
    /// Hidden-state sequence of the top layer (needed by attention).
    const Seq& top_hidden() const { return per_layer.back().h; }
    std::vector<LstmState> final_states() const;
  };

  /// Runs the stack over the window; initial states default to zeros.
  Cache forward(const Seq& xs,
                const std::vector<LstmState>* init = nullptr) const;

  /// d_top[t]: gradient on top-layer h_t. d_final (optional, per layer):
  /// gradient on the final (h, c) of each layer. Returns d/inputs and
  /// optionally the gradient on per-layer initial states.
  Seq backward(const Cache& cache, const Seq& d_top,
               const std::vector<LstmState>* d_final = nullptr,
               std::vector<LstmState>* d_init = nullptr);

 private:
  std::vector<LstmLayer> layers_;
};

}  // namespace foodchain
