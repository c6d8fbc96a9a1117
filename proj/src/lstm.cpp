#include "foodchain/lstm.hpp"

#include <cmath>
#include <stdexcept>

namespace foodchain {

LstmLayer::LstmLayer(std::size_t input_size, std::size_t hidden_size, Rng& rng)
    : wx(4 * hidden_size, input_size),
      wh(4 * hidden_size, hidden_size),
      b(4 * hidden_size, 1),
      input_size_(input_size),
      hidden_(hidden_size) {
  if (hidden_size == 0) throw std::invalid_argument("hidden size must be > 0");
  xavier_init(wx, input_size, hidden_size, rng);
  xavier_init(wh, hidden_size, hidden_size, rng);
  // forget-gate bias +1 aids long-horizon memory
  for (std::size_t j = 0; j < hidden_; ++j) b.v[j] = 1.0;
}

void LstmLayer::register_params(ParamSet& ps, const std::string& prefix) {
  ps.add(prefix + ".wx", &wx);
  ps.add(prefix + ".wh", &wh);
  ps.add(prefix + ".b", &b);
}

namespace {

struct Gates {
  Vec f, i, g, o, c, h, tanh_c;
};

}  // namespace

// Shared gate math for step() and forward().
static void lstm_gates(const Tensor& wx, const Tensor& wh, const Tensor& b,
                       std::size_t H, const Vec& x, const Vec& h_prev,
                       const Vec& c_prev, Gates& out) {
  Vec a(4 * H);
  affine(wx, x.data(), b.v.data(), a.data());
  for (std::size_t r = 0; r < 4 * H; ++r) {
    const double* wr = &wh.v[r * H];
    double s = a[r];
    for (std::size_t c = 0; c < H; ++c) s += wr[c] * h_prev[c];
    a[r] = s;
  }
  out.f.resize(H);
  out.i.resize(H);
  out.g.resize(H);
  out.o.resize(H);
  out.c.resize(H);
  out.h.resize(H);
  out.tanh_c.resize(H);
  for (std::size_t j = 0; j < H; ++j) {
    out.f[j] = sigmoid(a[j]);
    out.i[j] = sigmoid(a[H + j]);
    out.g[j] = std::tanh(a[2 * H + j]);
    out.o[j] = sigmoid(a[3 * H + j]);
    out.c[j] = out.f[j] * c_prev[j] + out.i[j] * out.g[j];
    out.tanh_c[j] = std::tanh(out.c[j]);
    out.h[j] = out.o[j] * out.tanh_c[j];
  }
}

LstmState LstmLayer::step(const Vec& x, const LstmState& state) const {
  if (x.size() != input_size_)
    throw std::invalid_argument("lstm_step: input dimension mismatch");
  Vec h_prev = state.h.empty() ? Vec(hidden_, 0.0) : state.h;
  Vec c_prev = state.c.empty() ? Vec(hidden_, 0.0) : state.c;
  if (h_prev.size() != hidden_ || c_prev.size() != hidden_)
    throw std::invalid_argument("lstm_step: state dimension mismatch");
  Gates gt;
  lstm_gates(wx, wh, b, hidden_, x, h_prev, c_prev, gt);
  return {gt.h, gt.c};
}

LstmLayer::Cache LstmLayer::forward(const Seq& xs,
                                    const LstmState* init) const {
  if (xs.empty()) throw std::invalid_argument("empty input window");
  Cache cache;
  cache.h0 = init && !init->h.empty() ? init->h : Vec(hidden_, 0.0);
  cache.c0 = init && !init->c.empty() ? init->c : Vec(hidden_, 0.0);
  if (cache.h0.size() != hidden_ || cache.c0.size() != hidden_)
    throw std::invalid_argument("lstm forward: init state size mismatch");
  const Vec* h_prev = &cache.h0;
  const Vec* c_prev = &cache.c0;
  for (const Vec& x : xs) {
    if (x.size() != input_size_)
      throw std::invalid_argument("lstm forward: input dimension mismatch");
    Gates gt;
    lstm_gates(wx, wh, b, hidden_, x, *h_prev, *c_prev, gt);
    cache.x.push_back(x);
    cache.f.push_back(std::move(gt.f));
    cache.i.push_back(std::move(gt.i));
    cache.g.push_back(std::move(gt.g));
    cache.o.push_back(std::move(gt.o));
    cache.c.push_back(std::move(gt.c));
    cache.tanh_c.push_back(std::move(gt.tanh_c));
    cache.h.push_back(std::move(gt.h));
    h_prev = &cache.h.back();
    c_prev = &cache.c.back();
  }
  return cache;
}

Seq LstmLayer::backward(const Cache& cache, const Seq& d_hidden,
                        const Vec& d_last_h, const Vec& d_last_c,
                        Vec* d_init_h, Vec* d_init_c) {
  const std::size_t T = cache.steps();
  const std::size_t H = hidden_;
  Seq dx(T, Vec(input_size_, 0.0));
  Vec dh_next(H, 0.0), dc_next(H, 0.0);
  if (!d_last_h.empty()) dh_next = d_last_h;
  if (!d_last_c.empty()) dc_next = d_last_c;

  Vec da(4 * H);
  for (std::size_t t = T; t-- > 0;) {
    Vec dh = dh_next;
    if (!d_hidden.empty() && !d_hidden[t].empty())
      for (std::size_t j = 0; j < H; ++j) dh[j] += d_hidden[t][j];

    const Vec& c_prev = t == 0 ? cache.c0 : cache.c[t - 1];
    const Vec& h_prev = t == 0 ? cache.h0 : cache.h[t - 1];
    Vec dc(H);
    for (std::size_t j = 0; j < H; ++j) {
      double tc = cache.tanh_c[t][j];
      double do_ = dh[j] * tc;
      dc[j] = dc_next[j] + dh[j] * cache.o[t][j] * (1.0 - tc * tc);
      double df = dc[j] * c_prev[j];
      double di = dc[j] * cache.g[t][j];
      double dg = dc[j] * cache.i[t][j];
      da[j] = df * cache.f[t][j] * (1.0 - cache.f[t][j]);
      da[H + j] = di * cache.i[t][j] * (1.0 - cache.i[t][j]);
      da[2 * H + j] = dg * (1.0 - cache.g[t][j] * cache.g[t][j]);
      da[3 * H + j] = do_ * cache.o[t][j] * (1.0 - cache.o[t][j]);
      dc_next[j] = dc[j] * cache.f[t][j];
    }
    affine_backward_weight(wx, da.data(), cache.x[t].data());
    affine_backward_weight(wh, da.data(), h_prev.data());
    for (std::size_t r = 0; r < 4 * H; ++r) b.g[r] += da[r];
    affine_backward_input(wx, da.data(), dx[t].data());
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    affine_backward_input(wh, da.data(), dh_next.data());
  }
  if (d_init_h) *d_init_h = dh_next;
  if (d_init_c) *d_init_c = dc_next;
  return dx;
}

// ---------------------------------------------------------------------------

LstmStack::LstmStack(std::size_t input_size,
                     const std::vector<std::size_t>& sizes, Rng& rng) {
  if (sizes.empty()) throw std::invalid_argument("empty LSTM stack");
  std::size_t in = input_size;
  for (std::size_t s : sizes) {
    layers_.emplace_back(in, s, rng);
    in = s;
  }
}

void LstmStack::register_params(ParamSet& ps, const std::string& prefix) {
  for (std::size_t l = 0; l < layers_.size(); ++l)
    layers_[l].register_params(ps, prefix + ".l" + std::to_string(l));
}

std::vector<LstmState> LstmStack::Cache::final_states() const {
  std::vector<LstmState> out;
  for (const auto& c : per_layer) out.push_back({c.h.back(), c.c.back()});
  return out;
}

LstmStack::Cache LstmStack::forward(const Seq& xs,
                                    const std::vector<LstmState>* init) const {
  if (init && init->size() != layers_.size())
    throw std::invalid_argument("stack init state count mismatch");
  Cache cache;
  const Seq* in = &xs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    cache.per_layer.push_back(
        layers_[l].forward(*in, init ? &(*init)[l] : nullptr));
    in = &cache.per_layer.back().h;
  }
  return cache;
}

Seq LstmStack::backward(const Cache& cache, const Seq& d_top,
                        const std::vector<LstmState>* d_final,
                        std::vector<LstmState>* d_init) {
  if (d_init) d_init->assign(layers_.size(), LstmState{});
  Seq d = d_top;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    Vec dlh, dlc;
    if (d_final && !(*d_final)[l].h.empty()) dlh = (*d_final)[l].h;
    if (d_final && !(*d_final)[l].c.empty()) dlc = (*d_final)[l].c;
    Vec* dih = d_init ? &(*d_init)[l].h : nullptr;
    Vec* dic = d_init ? &(*d_init)[l].c : nullptr;
    d = layers_[l].backward(cache.per_layer[l], d, dlh, dlc, dih, dic);
  }
  return d;
}

}  // namespace foodchain
