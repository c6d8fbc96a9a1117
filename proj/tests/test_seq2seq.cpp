#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "foodchain/seq2seq.hpp"
#include "foodchain/synth.hpp"

using namespace foodchain;

namespace {

Seq random_seq(std::size_t steps, std::size_t dim, Rng& rng) {
  Seq xs(steps, Vec(dim));
  for (auto& x : xs)
    for (auto& v : x) v = gaussian(rng);
  return xs;
}

TimeSeriesFrame sine_frame(std::size_t rows, double noise, std::uint64_t seed) {
  Rng rng(seed);
  TimeSeriesFrame f;
  f.target_name = "y";
  for (std::size_t i = 0; i < rows; ++i) {
    f.timestamps.push_back(1700000000 + 3600 * static_cast<std::int64_t>(i));
    f.target.push_back(std::sin(0.3 * static_cast<double>(i)) +
                       (noise > 0 ? gaussian(rng, 0.0, noise) : 0.0));
  }
  return f;
}

}  // namespace

TEST_CASE("attention on a single step puts all weight on it") {
  Rng rng(1);
  Attention attn(4, 3, 5, rng);
  Seq hidden = {{0.1, -0.2, 0.3, 0.4}};
  Vec query = {1.0, 0.0, -1.0};
  auto cache = attn.forward(hidden, query);
  REQUIRE(cache.weights.size() == 1);
  CHECK(cache.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t j = 0; j < 4; ++j)
    CHECK(cache.context[j] == doctest::Approx(hidden[0][j]).epsilon(1e-15));
}

TEST_CASE("identical hidden states get uniform weights") {
  Rng rng(2);
  Attention attn(3, 2, 4, rng);
  Seq hidden(5, Vec{0.4, -0.6, 0.2});
  auto cache = attn.forward(hidden, {0.7, -0.1});
  for (double w : cache.weights)
    CHECK(w == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("attention matches scalar softmax recomputation, seed 5") {
  Rng rng(5);
  Attention attn(3, 2, 4, rng);
  Seq hidden = random_seq(3, 3, rng);
  Vec query = {0.3, -0.9};
  auto cache = attn.forward(hidden, query);

  // scalar oracle
  std::vector<double> scores(3);
  for (std::size_t t = 0; t < 3; ++t) {
    double e = 0.0;
    for (std::size_t a = 0; a < 4; ++a) {
      double u = 0.0;
      for (std::size_t j = 0; j < 3; ++j) u += attn.wh.at(a, j) * hidden[t][j];
      for (std::size_t j = 0; j < 2; ++j) u += attn.wq.at(a, j) * query[j];
      e += attn.v.at(a, 0) * std::tanh(u);
    }
    scores[t] = e;
  }
  double mx = std::max({scores[0], scores[1], scores[2]});
  double z = 0.0;
  for (double s : scores) z += std::exp(s - mx);
  double sum = 0.0;
  for (std::size_t t = 0; t < 3; ++t) {
    double w = std::exp(scores[t] - mx) / z;
    CHECK(cache.weights[t] == doctest::Approx(w).epsilon(1e-12));
    sum += cache.weights[t];
  }
  CHECK(std::fabs(sum - 1.0) < 1e-12);
}

TEST_CASE("attention weights are nonnegative and sum to 1") {
  Rng rng(6);
  Attention attn(4, 4, 4, rng);
  for (int trial = 0; trial < 25; ++trial) {
    Seq hidden = random_seq(1 + trial % 9, 4, rng);
    Vec query(4);
    for (auto& q : query) q = gaussian(rng) * 3.0;
    auto cache = attn.forward(hidden, query);
    double sum = 0.0;
    for (double w : cache.weights) {
      CHECK(w >= 0.0);
      sum += w;
    }
    CHECK(std::fabs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("attention gradient check on 3 seeds") {
  for (std::uint64_t seed : {41ull, 42ull, 43ull}) {
    Rng rng(seed);
    Attention attn(3, 2, 4, rng);
    Seq hidden = random_seq(4, 3, rng);
    Vec query = {0.2, -0.5};
    ParamSet ps;
    attn.register_params(ps, "attn");
    auto loss = [&]() {
      auto cache = attn.forward(hidden, query);
      double s = 0.0;
      for (double v : cache.context) s += v * v;
      return s;
    };
    auto grads = [&]() {
      ps.zero_grads();
      auto cache = attn.forward(hidden, query);
      Vec d_ctx(3);
      for (std::size_t j = 0; j < 3; ++j) d_ctx[j] = 2.0 * cache.context[j];
      Vec d_query;
      attn.backward(cache, d_ctx, &d_query);
    };
    CHECK(grad_check(loss, grads, ps, 1e-5) <= 1e-4);
  }
}

TEST_CASE("autoencoder drives constant-window loss below 1e-4") {
  Rng rng(3);
  EncoderDecoder model(2, {6, 4}, rng);
  WindowedDataset ds;
  ds.window = 4;
  ds.input_dim = 2;
  for (int i = 0; i < 8; ++i) {
    ds.inputs.push_back(Seq(4, Vec{0.5, 0.25}));
    ds.targets.push_back(0.0);
    ds.splits.push_back(Split::train);
    ds.target_times.push_back(i);
  }
  SgdConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.epochs = 400;
  cfg.seed = 3;
  auto curve = pretrain_autoencoder(model, ds, cfg);
  REQUIRE(curve.size() == 400);
  CHECK(curve.back() < 1e-4);
}

TEST_CASE("autoencoder loss decreases over the first 10 epochs on a sinusoid") {
  auto frame = sine_frame(120, 0.05, 3);
  ForecasterConfig fc;
  fc.window = 8;
  fc.encoder_sizes = {6, 4};
  fc.use_wavelet = false;
  auto ds = build_forecast_dataset(frame, fc);
  Rng rng(3);
  EncoderDecoder model(ds.input_dim, fc.encoder_sizes, rng);
  SgdConfig cfg;
  cfg.learning_rate = 0.02;
  cfg.epochs = 10;
  cfg.seed = 3;
  auto curve = pretrain_autoencoder(model, ds, cfg);
  REQUIRE(curve.size() == 10);
  CHECK(curve.back() < curve.front());
}

TEST_CASE("zero-epoch pretraining changes nothing") {
  Rng rng(4);
  EncoderDecoder model(1, {3}, rng);
  ParamSet ps;
  model.register_params(ps, "ae");
  auto before = ps.snapshot();
  WindowedDataset ds;
  ds.window = 2;
  ds.input_dim = 1;
  ds.inputs.push_back(Seq(2, Vec{1.0}));
  ds.targets.push_back(0.0);
  ds.splits.push_back(Split::train);
  ds.target_times.push_back(0);
  SgdConfig cfg;
  cfg.epochs = 1;
  auto curve = pretrain_autoencoder(model, ds, SgdConfig{0.001, 32, 0, 0, 5.0});
  CHECK(curve.empty());
  CHECK(ps.snapshot() == before);
}

TEST_CASE("all-zero head makes the forecast equal the output bias") {
  Rng rng(7);
  ForecasterConfig fc;
  fc.window = 4;
  fc.encoder_sizes = {4, 3};
  fc.predictor_sizes = {4};
  fc.attention_align = 3;
  Forecaster model(fc, 2, rng);
  model.head.w.v.assign(model.head.w.size(), 0.0);
  model.head.b.v.assign(model.head.b.size(), 0.0);
  model.head.b.at(0, 0) = 0.625;
  Seq window = random_seq(4, 2, rng);
  CHECK(model.forward(window) == doctest::Approx(0.625).epsilon(1e-15));
}

TEST_CASE("ablation consistency: flags off equals the plain LSTM path") {
  Rng rng(15);
  ForecasterConfig fc;
  fc.use_wavelet = fc.use_attention = fc.use_encoder = false;
  fc.window = 6;
  fc.encoder_sizes = {5, 4};
  fc.predictor_sizes = {5, 4};
  Forecaster model(fc, 3, rng);

  // the standalone regressor: same predictor stack + head, shared weights
  Seq window = random_seq(6, 3, rng);
  auto cache = model.predictor.forward(window);
  auto out = model.head.forward({cache.top_hidden().back()});
  CHECK(model.forward(window) == doctest::Approx(out[0][0]).epsilon(1e-15));
}

TEST_CASE("full pipeline (wavelet off) end-to-end gradient check, 3 seeds") {
  for (std::uint64_t seed : {51ull, 52ull, 53ull}) {
    Rng rng(seed);
    ForecasterConfig fc;
    fc.use_wavelet = false;
    fc.window = 5;
    fc.encoder_sizes = {4, 3};
    fc.predictor_sizes = {4};
    fc.attention_align = 3;
    Forecaster model(fc, 2, rng);
    Seq window = random_seq(5, 2, rng);
    double target = 0.7;

    ParamSet ps;
    model.register_params(ps, /*include_frozen_encoder=*/true);
    auto loss = [&]() {
      double d = model.forward(window) - target;
      return d * d;
    };
    auto grads = [&]() {
      ps.zero_grads();
      Forecaster::Cache cache;
      double pred = model.forward(window, cache);
      model.backward(cache, 2.0 * (pred - target));
    };
    CHECK(grad_check(loss, grads, ps, 1e-5) <= 1e-4);
  }
}

TEST_CASE("train_forecaster is deterministic across reruns") {
  auto frame = sine_frame(160, 0.05, 8);
  ForecasterConfig fc;
  fc.window = 8;
  fc.encoder_sizes = {5, 3};
  fc.predictor_sizes = {5};
  fc.attention_align = 4;
  fc.sgd.epochs = 3;
  fc.pretrain_epochs = 1;
  fc.sgd.seed = 8;
  auto [m1, r1] = train_forecaster(fc, frame);
  auto [m2, r2] = train_forecaster(fc, frame);
  CHECK(r1.rmse == r2.rmse);
  CHECK(r1.predictions == r2.predictions);
  CHECK(r1.val_rmse_curve == r2.val_rmse_curve);
}

TEST_CASE("forecaster fits a noiseless sinusoid to RMSE < 0.05") {
  auto frame = sine_frame(400, 0.0, 12);
  ForecasterConfig fc;
  fc.window = 10;
  fc.encoder_sizes = {12, 8};
  fc.predictor_sizes = {12};
  fc.attention_align = 8;
  fc.use_wavelet = false;
  fc.pretrain_epochs = 5;
  fc.sgd.epochs = 120;
  fc.sgd.learning_rate = 0.05;
  fc.sgd.seed = 12;
  auto [model, report] = train_forecaster(fc, frame);
  CHECK(report.rmse < 0.05);
}

TEST_CASE("ablation report structure matches the five-variant table") {
  auto frame = sine_frame(140, 0.05, 9);
  ForecasterConfig base;
  base.window = 8;
  base.encoder_sizes = {4, 3};
  base.predictor_sizes = {4};
  base.attention_align = 3;
  base.mlp_hidden = {8};
  base.sgd.epochs = 2;
  base.pretrain_epochs = 1;
  auto report = ablate(frame, {1, 2, 3}, base);

  REQUIRE(report.rows.size() == 7);
  const char* names[] = {"SVR", "RFR", "MLP", "LSTM", "WT-ED-LSTM",
                         "ED-LSTM-AM", "WT-ED-LSTM-AM"};
  std::size_t scored = 0;
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(report.rows[i].variant == names[i]);
    if (i < 2) {
      CHECK(report.rows[i].out_of_scope);
    } else {
      CHECK_FALSE(report.rows[i].out_of_scope);
      REQUIRE(report.rows[i].rmse.size() == 3);
      ++scored;
    }
  }
  CHECK(scored == 5);
  CHECK(report.to_csv().find("out-of-scope") != std::string::npos);
}

TEST_CASE("all variants reach RMSE ~0 on a constant series") {
  TimeSeriesFrame f;
  f.target_name = "y";
  for (int i = 0; i < 120; ++i) {
    f.timestamps.push_back(1700000000 + 3600 * i);
    f.target.push_back(42.0);
  }
  ForecasterConfig base;
  base.window = 6;
  base.encoder_sizes = {3, 2};
  base.predictor_sizes = {3};
  base.attention_align = 2;
  base.mlp_hidden = {4};
  base.sgd.epochs = 1;
  base.pretrain_epochs = 1;
  auto report = ablate(f, {1}, base);
  for (const auto& row : report.rows) {
    if (row.out_of_scope) continue;
    CHECK(row.rmse[0] < 1e-8);
  }
}

TEST_CASE("config fingerprint distinguishes configs and is stable") {
  ForecasterConfig a, b;
  CHECK(a.fingerprint() == b.fingerprint());
  b.window = 16;
  CHECK(a.fingerprint() != b.fingerprint());
}
