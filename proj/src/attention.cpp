#include "foodchain/attention.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace foodchain {

Attention::Attention(std::size_t hidden_size, std::size_t query_size,
                     std::size_t align_size, Rng& rng)
    : wh(align_size, hidden_size), wq(align_size, query_size), v(align_size, 1) {
  xavier_init(wh, hidden_size, align_size, rng);
  xavier_init(wq, query_size, align_size, rng);
  xavier_init(v, align_size, 1, rng);
}

void Attention::register_params(ParamSet& ps, const std::string& prefix) {
  ps.add(prefix + ".wh", &wh);
  ps.add(prefix + ".wq", &wq);
  ps.add(prefix + ".v", &v);
}

Attention::Cache Attention::forward(const Seq& hidden_sequence,
                                    const Vec& query) const {
  if (hidden_sequence.empty())
    throw std::invalid_argument("attention: empty hidden sequence");
  const std::size_t T = hidden_sequence.size();
  const std::size_t A = v.rows;
  const std::size_t H = wh.cols;

  Cache cache;
  cache.hidden = hidden_sequence;
  cache.query = query;

  Vec wq_q(A);
  affine(wq, query.data(), nullptr, wq_q.data());

  Vec scores(T);
  cache.u.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    if (hidden_sequence[t].size() != H)
      throw std::invalid_argument("attention: hidden size mismatch");
    Vec a(A);
    affine(wh, hidden_sequence[t].data(), nullptr, a.data());
    double e = 0.0;
    cache.u[t].resize(A);
    for (std::size_t k = 0; k < A; ++k) {
      cache.u[t][k] = std::tanh(a[k] + wq_q[k]);
      e += v.v[k] * cache.u[t][k];
    }
    scores[t] = e;
  }

  double mx = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  cache.weights.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    cache.weights[t] = std::exp(scores[t] - mx);
    z += cache.weights[t];
  }
  for (double& w : cache.weights) w /= z;

  cache.context.assign(H, 0.0);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t j = 0; j < H; ++j)
      cache.context[j] += cache.weights[t] * hidden_sequence[t][j];
  return cache;
}

Seq Attention::backward(const Cache& cache, const Vec& d_context,
                        Vec* d_query) {
  const std::size_t T = cache.hidden.size();
  const std::size_t A = v.rows;
  const std::size_t H = wh.cols;

  Seq d_hidden(T, Vec(H, 0.0));
  Vec d_alpha(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < H; ++j) {
      d_alpha[t] += d_context[j] * cache.hidden[t][j];
      d_hidden[t][j] += cache.weights[t] * d_context[j];
    }
  }
  // softmax backward
  double dot = 0.0;
  for (std::size_t t = 0; t < T; ++t) dot += cache.weights[t] * d_alpha[t];
  Vec d_score(T);
  for (std::size_t t = 0; t < T; ++t)
    d_score[t] = cache.weights[t] * (d_alpha[t] - dot);

  if (d_query) d_query->assign(wq.cols, 0.0);
  Vec da(A);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t k = 0; k < A; ++k) {
      v.g[k] += d_score[t] * cache.u[t][k];
      double du = d_score[t] * v.v[k];
      da[k] = du * (1.0 - cache.u[t][k] * cache.u[t][k]);
    }
    affine_backward_weight(wh, da.data(), cache.hidden[t].data());
    affine_backward_weight(wq, da.data(), cache.query.data());
    affine_backward_input(wh, da.data(), d_hidden[t].data());
    if (d_query) affine_backward_input(wq, da.data(), d_query->data());
  }
  return d_hidden;
}

}  // namespace foodchain
