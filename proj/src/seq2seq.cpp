#include "foodchain/seq2seq.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace foodchain {

namespace {

std::string variant_name(const ForecasterConfig& c) {
  if (!c.use_encoder && !c.use_attention && !c.use_wavelet) return "LSTM";
  std::string n;
  if (c.use_wavelet) n += "WT-";
  if (c.use_encoder) n += "ED-";
  n += "LSTM";
  if (c.use_attention) n += "-AM";
  return n;
}

double mean_squared(const std::vector<double>& pred,
                    const std::vector<double>& truth) {
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    double e = pred[i] - truth[i];
    s += e * e;
  }
  return pred.empty() ? 0.0 : s / static_cast<double>(pred.size());
}

}  // namespace

// ---------------------------------------------------------------------------
// EncoderDecoder

EncoderDecoder::EncoderDecoder(std::size_t input_dim,
                               const std::vector<std::size_t>& sizes,
                               Rng& rng) {
  encoder = LstmStack(input_dim, sizes, rng);
  std::vector<std::size_t> mirrored(sizes.rbegin(), sizes.rend());
  decoder = LstmStack(sizes.back(), mirrored, rng);
  recon_head = DenseLayer(mirrored.back(), input_dim, Activation::linear, rng);
}

void EncoderDecoder::register_params(ParamSet& ps, const std::string& prefix) {
  encoder.register_params(ps, prefix + ".enc");
  decoder.register_params(ps, prefix + ".dec");
  recon_head.register_params(ps, prefix + ".recon");
}

double EncoderDecoder::reconstruct(const Seq& window, Cache& cache) const {
  cache.window = window;
  cache.enc = encoder.forward(window);
  auto finals = cache.enc.final_states();

  const std::size_t L = encoder.depth();
  std::vector<LstmState> dec_init(L);
  for (std::size_t l = 0; l < L; ++l) dec_init[l] = finals[L - 1 - l];

  const Vec& summary = cache.enc.top_hidden().back();
  cache.dec_in.assign(window.size(), summary);
  cache.dec = decoder.forward(cache.dec_in, &dec_init);

  cache.recon = recon_head.forward(cache.dec.top_hidden());
  double loss = 0.0;
  const std::size_t D = window[0].size();
  for (std::size_t t = 0; t < window.size(); ++t)
    for (std::size_t d = 0; d < D; ++d) {
      double e = cache.recon[t][d] - window[t][d];
      loss += e * e;
    }
  return loss / static_cast<double>(window.size() * D);
}

void EncoderDecoder::backward(const Cache& cache, double loss_scale) {
  const std::size_t T = cache.window.size();
  const std::size_t D = cache.window[0].size();
  Seq d_recon(T, Vec(D));
  double scale = 2.0 * loss_scale / static_cast<double>(T * D);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t d = 0; d < D; ++d)
      d_recon[t][d] = scale * (cache.recon[t][d] - cache.window[t][d]);

  Seq d_dec_top =
      recon_head.backward(d_recon, cache.dec.top_hidden(), cache.recon);

  std::vector<LstmState> d_dec_init;
  Seq d_dec_in = decoder.backward(cache.dec, d_dec_top, nullptr, &d_dec_init);

  // decoder layer l was initialized from encoder layer L-1-l
  const std::size_t L = encoder.depth();
  std::vector<LstmState> d_enc_final(L);
  for (std::size_t l = 0; l < L; ++l) d_enc_final[L - 1 - l] = d_dec_init[l];

  // the repeated decoder input is the encoder's final top hidden state
  auto& top_h = d_enc_final[L - 1].h;
  if (top_h.empty()) top_h.assign(encoder.top_size(), 0.0);
  for (const Vec& dx : d_dec_in)
    for (std::size_t j = 0; j < top_h.size(); ++j) top_h[j] += dx[j];

  Seq empty_top(T);
  encoder.backward(cache.enc, empty_top, &d_enc_final, nullptr);
}

std::vector<double> pretrain_autoencoder(EncoderDecoder& model,
                                         const WindowedDataset& dataset,
                                         const SgdConfig& config) {
  std::vector<double> curve;
  if (config.epochs == 0) return curve;

  ParamSet ps;
  model.register_params(ps, "ae");
  auto train_idx = dataset.indices(Split::train);
  if (train_idx.empty()) throw std::invalid_argument("no training samples");

  Rng rng(config.seed);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double epoch_loss = 0.0;
    std::size_t done = 0;
    while (done < train_idx.size()) {
      std::size_t bsz = std::min(config.batch_size, train_idx.size() - done);
      double scale = 1.0 / static_cast<double>(bsz);
      for (std::size_t k = 0; k < bsz; ++k) {
        EncoderDecoder::Cache cache;
        double loss = model.reconstruct(dataset.inputs[train_idx[done + k]], cache);
        if (!std::isfinite(loss))
          throw std::runtime_error("autoencoder diverged at epoch " +
                                   std::to_string(epoch));
        epoch_loss += loss;
        model.backward(cache, scale);
      }
      sgd_step(ps, config);
      done += bsz;
    }
    curve.push_back(epoch_loss / static_cast<double>(train_idx.size()));
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Forecaster

std::string ForecasterConfig::fingerprint() const {
  std::ostringstream os;
  os << "wt=" << use_wavelet << ";am=" << use_attention << ";ed=" << use_encoder
     << ";freeze=" << freeze_encoder << ";enc=";
  for (auto s : encoder_sizes) os << s << ",";
  os << ";pred=";
  for (auto s : predictor_sizes) os << s << ",";
  os << ";align=" << attention_align << ";mlp=";
  for (auto s : mlp_hidden) os << s << ",";
  os << ";win=" << window << ";h=" << horizon_steps << ";sh=" << step_hours
     << ";wl=" << wavelet_levels << ";pre=" << pretrain_epochs
     << ";lr=" << sgd.learning_rate << ";bs=" << sgd.batch_size
     << ";ep=" << sgd.epochs << ";seed=" << sgd.seed
     << ";clip=" << sgd.clip_norm;
  const std::string s = os.str();
  uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(s.data()),
                    static_cast<uInt>(s.size()));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

Forecaster::Forecaster(const ForecasterConfig& config, std::size_t input_dim,
                       Rng& rng)
    : config_(config) {
  std::size_t emb_dim = input_dim;
  if (config.use_encoder) {
    autoencoder = EncoderDecoder(input_dim, config.encoder_sizes, rng);
    emb_dim = config.encoder_sizes.back();
  }
  predictor = LstmStack(emb_dim, config.predictor_sizes, rng);
  std::size_t feat_dim = predictor.top_size();
  if (config.use_attention) {
    attention = Attention(predictor.top_size(), predictor.top_size(),
                          config.attention_align, rng);
    feat_dim += predictor.top_size();
  }
  head = DenseLayer(feat_dim, 1, Activation::linear, rng);
}

void Forecaster::register_params(ParamSet& ps, bool include_frozen_encoder) {
  if (config_.use_encoder &&
      (!config_.freeze_encoder || include_frozen_encoder))
    autoencoder.encoder.register_params(ps, "enc");
  predictor.register_params(ps, "pred");
  if (config_.use_attention) attention.register_params(ps, "attn");
  head.register_params(ps, "head");
}

double Forecaster::forward(const Seq& window, Cache& cache) const {
  const Seq* embeddings = &window;
  if (config_.use_encoder) {
    cache.enc = autoencoder.encoder.forward(window);
    embeddings = &cache.enc.top_hidden();
  }
  cache.embeddings = *embeddings;
  cache.pred = predictor.forward(cache.embeddings);
  const Seq& hs = cache.pred.top_hidden();
  const Vec& h_final = hs.back();

  if (config_.use_attention) {
    cache.attn = attention.forward(hs, h_final);
    cache.feat = h_final;
    cache.feat.insert(cache.feat.end(), cache.attn.context.begin(),
                      cache.attn.context.end());
  } else {
    cache.feat = h_final;
  }
  auto out = head.forward({cache.feat});
  cache.prediction = out[0][0];
  return cache.prediction;
}

double Forecaster::forward(const Seq& window) const {
  Cache cache;
  return forward(window, cache);
}

void Forecaster::backward(const Cache& cache, double d_prediction) {
  auto d_feat_batch =
      head.backward({{d_prediction}}, {cache.feat}, {{cache.prediction}});
  const Vec& d_feat = d_feat_batch[0];

  const std::size_t H = predictor.top_size();
  const std::size_t T = cache.pred.top_hidden().size();
  Seq d_top(T);
  Vec d_h_final(d_feat.begin(), d_feat.begin() + H);

  if (config_.use_attention) {
    Vec d_context(d_feat.begin() + H, d_feat.end());
    Vec d_query;
    Seq d_hidden = attention.backward(cache.attn, d_context, &d_query);
    d_top = d_hidden;
    for (std::size_t j = 0; j < H; ++j) d_top[T - 1][j] += d_query[j];
  } else {
    for (auto& v : d_top) v.clear();
    d_top[T - 1].assign(H, 0.0);
  }
  if (d_top[T - 1].empty()) d_top[T - 1].assign(H, 0.0);
  for (std::size_t j = 0; j < H; ++j) d_top[T - 1][j] += d_h_final[j];

  Seq d_emb = predictor.backward(cache.pred, d_top);

  if (config_.use_encoder && !config_.freeze_encoder)
    autoencoder.encoder.backward(cache.enc, d_emb);
}

// ---------------------------------------------------------------------------
// Dataset construction

namespace {

void denoise_segment(std::vector<double>& col, std::size_t begin,
                     std::size_t end, std::size_t levels) {
  std::size_t len = end - begin;
  if (len < (std::size_t{1} << levels)) return;  // segment too short to filter
  std::vector<double> seg(col.begin() + begin, col.begin() + end);
  seg = wavelet_denoise(seg, levels);
  std::copy(seg.begin(), seg.end(), col.begin() + begin);
}

}  // namespace

WindowedDataset build_forecast_dataset(const TimeSeriesFrame& frame,
                                       const ForecasterConfig& config,
                                       NormalizerState* out_norm) {
  TimeSeriesFrame inputs = frame;
  if (config.use_wavelet) {
    std::size_t rows = frame.rows();
    std::size_t b1 = static_cast<std::size_t>(0.7 * static_cast<double>(rows));
    std::size_t b2 = static_cast<std::size_t>(0.8 * static_cast<double>(rows));
    auto denoise_col = [&](std::vector<double>& col) {
      denoise_segment(col, 0, b1, config.wavelet_levels);
      denoise_segment(col, b1, b2, config.wavelet_levels);
      denoise_segment(col, b2, rows, config.wavelet_levels);
    };
    for (auto& col : inputs.channels) denoise_col(col);
    denoise_col(inputs.target);
  }

  auto [norm_frame, norm] = fit_apply_minmax(inputs, 0.7);
  WindowedDataset ds = make_windows(norm_frame, config.window,
                                    config.horizon_steps, config.step_hours);

  // labels come from the unfiltered target, normalized with the same state
  std::size_t tc = norm.target_col();
  for (std::size_t s = 0; s < ds.size(); ++s) {
    std::size_t t = s + ds.window + ds.lead - 1;
    ds.targets[s] = norm.normalize(tc, frame.target[t]);
  }
  if (out_norm) *out_norm = norm;
  return ds;
}

// ---------------------------------------------------------------------------
// Training

namespace {

template <typename EvalFn>
double split_rmse(const WindowedDataset& ds, Split split, EvalFn&& eval) {
  auto idx = ds.indices(split);
  if (idx.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i : idx) {
    double e = eval(i) - ds.targets[i];
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(idx.size()));
}

struct TrainOutcome {
  std::vector<double> loss_curve;
  std::vector<double> val_curve;
  std::size_t best_epoch = 0;
};

/// Shared SGD loop: shuffles the train split, accumulates 1/B-scaled
/// gradients per batch, checkpoints the lowest-validation-RMSE epoch.
template <typename StepFn, typename EvalFn>
TrainOutcome run_training(const WindowedDataset& ds, const SgdConfig& config,
                          ParamSet& ps, StepFn&& train_sample,
                          EvalFn&& eval_sample) {
  config.validate();
  auto train_idx = ds.indices(Split::train);
  if (train_idx.empty()) throw std::invalid_argument("no training samples");

  TrainOutcome out;
  Rng rng(config.seed ^ 0x5eed5eedULL);
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best_snap = ps.snapshot();

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double epoch_loss = 0.0;
    std::size_t done = 0;
    while (done < train_idx.size()) {
      std::size_t bsz = std::min(config.batch_size, train_idx.size() - done);
      double scale = 1.0 / static_cast<double>(bsz);
      for (std::size_t k = 0; k < bsz; ++k) {
        double loss = train_sample(train_idx[done + k], scale);
        if (!std::isfinite(loss))
          throw std::runtime_error("training diverged at epoch " +
                                   std::to_string(epoch));
        epoch_loss += loss;
      }
      sgd_step(ps, config);
      done += bsz;
    }
    out.loss_curve.push_back(epoch_loss /
                             static_cast<double>(train_idx.size()));
    double val = split_rmse(ds, Split::val, eval_sample);
    out.val_curve.push_back(val);
    if (val < best_val) {
      best_val = val;
      best_snap = ps.snapshot();
      out.best_epoch = epoch;
    }
  }
  ps.restore(best_snap);
  return out;
}

/// Test metrics are reported in original target units so that variants with
/// different preprocessing (and hence different normalizer states) stay
/// comparable.
template <typename EvalFn>
void fill_test_report(const WindowedDataset& ds, const NormalizerState& norm,
                      EvalFn&& eval, EvalReport& report) {
  auto test_idx = ds.indices(Split::test);
  std::size_t tc = norm.target_col();
  for (std::size_t i : test_idx) {
    report.predictions.push_back(norm.denormalize(tc, eval(i)));
    report.truths.push_back(norm.denormalize(tc, ds.targets[i]));
    report.times.push_back(ds.target_times[i]);
  }
  report.mse = mean_squared(report.predictions, report.truths);
  report.rmse = std::sqrt(report.mse);
}

}  // namespace

std::pair<std::unique_ptr<Forecaster>, EvalReport> train_forecaster(
    const ForecasterConfig& config, const TimeSeriesFrame& frame) {
  config.sgd.validate();
  NormalizerState norm;
  WindowedDataset ds = build_forecast_dataset(frame, config, &norm);

  Rng rng(config.sgd.seed);
  auto model = std::make_unique<Forecaster>(config, ds.input_dim, rng);

  if (config.use_encoder) {
    SgdConfig pre = config.sgd;
    if (config.pretrain_epochs) pre.epochs = config.pretrain_epochs;
    pretrain_autoencoder(model->autoencoder, ds, pre);
  }

  ParamSet ps;
  model->register_params(ps);

  auto train_sample = [&](std::size_t i, double scale) {
    Forecaster::Cache cache;
    double pred = model->forward(ds.inputs[i], cache);
    double err = pred - ds.targets[i];
    model->backward(cache, 2.0 * err * scale);
    return err * err;
  };
  auto eval_sample = [&](std::size_t i) { return model->forward(ds.inputs[i]); };

  TrainOutcome outcome = run_training(ds, config.sgd, ps, train_sample,
                                      eval_sample);

  EvalReport report;
  report.variant = variant_name(config);
  report.horizon_steps = config.horizon_steps;
  report.train_loss_curve = outcome.loss_curve;
  report.val_rmse_curve = outcome.val_curve;
  report.best_epoch = outcome.best_epoch;
  report.seed = config.sgd.seed;
  report.config_fingerprint = config.fingerprint();
  fill_test_report(ds, norm, eval_sample, report);
  return {std::move(model), std::move(report)};
}

EvalReport train_mlp_baseline(const ForecasterConfig& config,
                              const TimeSeriesFrame& frame) {
  ForecasterConfig c = config;
  c.use_wavelet = false;  // baseline consumes the raw normalized series
  c.sgd.validate();
  NormalizerState norm;
  WindowedDataset ds = build_forecast_dataset(frame, c, &norm);

  auto flatten = [&](std::size_t i) {
    std::vector<double> f;
    f.reserve(ds.window * ds.input_dim);
    for (const auto& row : ds.inputs[i])
      f.insert(f.end(), row.begin(), row.end());
    return f;
  };

  Rng rng(c.sgd.seed);
  Mlp model(ds.window * ds.input_dim, c.mlp_hidden, 1, rng);
  ParamSet ps;
  model.register_params(ps, "mlp");

  auto train_sample = [&](std::size_t i, double scale) {
    Mlp::Cache cache;
    auto out = model.forward({flatten(i)}, &cache);
    double err = out[0][0] - ds.targets[i];
    model.backward({{2.0 * err * scale}}, cache);
    return err * err;
  };
  auto eval_sample = [&](std::size_t i) {
    return model.predict_scalar(flatten(i));
  };

  TrainOutcome outcome = run_training(ds, c.sgd, ps, train_sample, eval_sample);

  EvalReport report;
  report.variant = "MLP";
  report.horizon_steps = c.horizon_steps;
  report.train_loss_curve = outcome.loss_curve;
  report.val_rmse_curve = outcome.val_curve;
  report.best_epoch = outcome.best_epoch;
  report.seed = c.sgd.seed;
  report.config_fingerprint = c.fingerprint();
  fill_test_report(ds, norm, eval_sample, report);
  return report;
}

// ---------------------------------------------------------------------------
// Ablation harness

namespace {

struct VariantFlags {
  std::string name;
  bool wavelet, encoder, attention;
  bool mlp = false;
  bool out_of_scope = false;
};

const std::vector<VariantFlags> kTable1Variants = {
    {"SVR", false, false, false, false, true},
    {"RFR", false, false, false, false, true},
    {"MLP", false, false, false, true, false},
    {"LSTM", false, false, false, false, false},
    {"WT-ED-LSTM", true, true, false, false, false},
    {"ED-LSTM-AM", false, true, true, false, false},
    {"WT-ED-LSTM-AM", true, true, true, false, false},
};

}  // namespace

AblationReport ablate(const TimeSeriesFrame& frame,
                      const std::vector<std::size_t>& horizons,
                      const ForecasterConfig& base_config) {
  AblationReport report;
  report.horizons = horizons;
  for (const auto& variant : kTable1Variants) {
    AblationRow row;
    row.variant = variant.name;
    row.out_of_scope = variant.out_of_scope;
    if (!variant.out_of_scope) {
      for (std::size_t h : horizons) {
        ForecasterConfig c = base_config;
        c.horizon_steps = h;
        c.use_wavelet = variant.wavelet;
        c.use_encoder = variant.encoder;
        c.use_attention = variant.attention;
        if (variant.name == "LSTM") c.predictor_sizes = c.encoder_sizes;
        EvalReport r = variant.mlp ? train_mlp_baseline(c, frame)
                                   : train_forecaster(c, frame).second;
        row.rmse.push_back(r.rmse);
        if (h == horizons.back()) report.reports.push_back(std::move(r));
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string AblationReport::to_csv() const {
  std::ostringstream os;
  os << "method";
  for (std::size_t h : horizons) os << ",rmse_h" << h;
  os << "\n";
  char buf[64];
  for (const auto& row : rows) {
    os << row.variant;
    if (row.out_of_scope) {
      for (std::size_t i = 0; i < horizons.size(); ++i) os << ",out-of-scope";
    } else {
      for (double r : row.rmse) {
        std::snprintf(buf, sizeof(buf), "%.17g", r);
        os << "," << buf;
      }
    }
    os << "\n";
  }
  return os.str();
}

std::string AblationReport::to_text() const {
  std::ostringstream os;
  os << "Method            ";
  for (std::size_t h : horizons) os << "  " << h << "-step RMSE";
  os << "\n";
  char buf[64];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%-18s", row.variant.c_str());
    os << buf;
    if (row.out_of_scope) {
      for (std::size_t i = 0; i < horizons.size(); ++i) os << "  out-of-scope";
    } else {
      for (double r : row.rmse) {
        std::snprintf(buf, sizeof(buf), "  %12.6f", r);
        os << buf;
      }
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace foodchain
