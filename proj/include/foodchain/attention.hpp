#pragma once

#include <string>
#include <vector>

#include "foodchain/lstm.hpp"
#include "foodchain/param_set.hpp"

namespace foodchain {

/// Additive attention over a hidden-state sequence:
///   e_t = v^T tanh(Wh h_t + Wq q),  alpha = softmax(e),
///   context = sum_t alpha_t h_t.
class Attention {
 public:
  Attention() = default;
  Attention(std::size_t hidden_size, std::size_t query_size,
            std::size_t align_size, Rng& rng);

  void register_params(ParamSet& ps, const std::string& prefix);

  struct Cache {
    Seq hidden;
    Vec query;
    Seq u;        // tanh(Wh h_t + Wq q)
    Vec weights;  // softmax output
    Vec context;
  };

  /// Returns (context, weights) in the cache; weights sum to 1.
  Cache forward(const Seq& hidden_sequence, const Vec& query) const;

  /// Accumulates parameter gradients; returns d/hidden per step and fills
  /// d/query.
  Seq backward(const Cache& cache, const Vec& d_context, Vec* d_query);

  Tensor wh;  // (A x H)
  Tensor wq;  // (A x Q)
  Tensor v;   // (A x 1)
};

}  // namespace foodchain
