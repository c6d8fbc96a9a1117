#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "foodchain/attention.hpp"
#include "foodchain/lstm.hpp"
#include "foodchain/mlp.hpp"
#include "foodchain/sgd.hpp"
#include "foodchain/signal.hpp"
#include "foodchain/time_series.hpp"

namespace foodchain {

/// LSTM autoencoder: encoder stack summarizes the window, the mirror-image
/// decoder reconstructs it from the encoder's final states (the decoder is
/// fed the encoder's final top hidden state at every step).
class EncoderDecoder {
 public:
  EncoderDecoder() = default;
  EncoderDecoder(std::size_t input_dim, const std::vector<std::size_t>& sizes,
                 Rng& rng);

  void register_params(ParamSet& ps, const std::string& prefix);

  struct Cache {
    LstmStack::Cache enc, dec;
    Seq dec_in, recon;
    Seq window;
  };

  /// Mean squared reconstruction error of one window.
  double reconstruct(const Seq& window, Cache& cache) const;
  void backward(const Cache& cache, double loss_scale);

  LstmStack encoder;
  LstmStack decoder;
  DenseLayer recon_head;
};

/// Per-epoch mean reconstruction loss over the training split.
std::vector<double> pretrain_autoencoder(EncoderDecoder& model,
                                         const WindowedDataset& dataset,
                                         const SgdConfig& config);

// ---------------------------------------------------------------------------

struct ForecasterConfig {
  bool use_wavelet = true;
  bool use_attention = true;
  bool use_encoder = true;
  bool freeze_encoder = false;
  std::vector<std::size_t> encoder_sizes = {128, 32};
  std::vector<std::size_t> predictor_sizes = {128};
  std::size_t attention_align = 32;
  std::vector<std::size_t> mlp_hidden = {64, 64};  // MLP baseline
  std::size_t window = 15;
  std::size_t horizon_steps = 1;
  std::size_t step_hours = 0;  // 0: paper mapping 1/6/12
  std::size_t wavelet_levels = 1;
  std::size_t pretrain_epochs = 0;  // 0: same as config.epochs
  SgdConfig sgd;

  std::string fingerprint() const;
};

struct EvalReport {
  std::string variant;
  std::size_t horizon_steps = 0;
  double rmse = 0.0;  // test split only
  double mse = 0.0;
  std::vector<double> predictions;  // test split, chronological
  std::vector<double> truths;
  std::vector<std::int64_t> times;
  std::vector<double> train_loss_curve;
  std::vector<double> val_rmse_curve;
  std::size_t best_epoch = 0;
  std::uint64_t seed = 0;
  std::string config_fingerprint;
};

/// The assembled pipeline: (optional wavelet preprocessing, handled by the
/// dataset builder) -> optional encoder embeddings -> predictor LSTM ->
/// optional attention context concatenated with the final hidden state ->
/// single dense layer -> scalar prediction.
class Forecaster {
 public:
  Forecaster() = default;
  Forecaster(const ForecasterConfig& config, std::size_t input_dim, Rng& rng);

  void register_params(ParamSet& ps, bool include_frozen_encoder = false);

  struct Cache {
    LstmStack::Cache enc, pred;
    Seq embeddings;
    Attention::Cache attn;
    std::vector<double> feat;
    double prediction = 0.0;
  };

  double forward(const Seq& window, Cache& cache) const;
  double forward(const Seq& window) const;
  void backward(const Cache& cache, double d_prediction);

  const ForecasterConfig& config() const { return config_; }

  EncoderDecoder autoencoder;  // encoder half feeds the predictor
  LstmStack predictor;
  Attention attention;
  DenseLayer head;

 private:
  ForecasterConfig config_;
};

// ---------------------------------------------------------------------------

/// Denoise-then-normalize preprocessing per the pipeline's Step 1: the
/// wavelet filter runs within each chronological split independently and only
/// on the inputs; labels come from the unfiltered (normalized) target.
WindowedDataset build_forecast_dataset(const TimeSeriesFrame& frame,
                                       const ForecasterConfig& config,
                                       NormalizerState* out_norm = nullptr);

/// Full training pipeline: preprocessing, optional autoencoder pretraining,
/// supervised MSE training with best-validation-epoch checkpointing,
/// evaluation on the chronological test split.
std::pair<std::unique_ptr<Forecaster>, EvalReport> train_forecaster(
    const ForecasterConfig& config, const TimeSeriesFrame& frame);

/// MLP baseline over the flattened window (shared preprocessing, wavelet off).
EvalReport train_mlp_baseline(const ForecasterConfig& config,
                              const TimeSeriesFrame& frame);

// ---------------------------------------------------------------------------

struct AblationRow {
  std::string variant;
  std::vector<double> rmse;  // one entry per requested horizon
  bool out_of_scope = false;
};

struct AblationReport {
  std::vector<std::size_t> horizons;
  std::vector<AblationRow> rows;
  /// Per-sample test-split traces for the last horizon run, per variant.
  std::vector<EvalReport> reports;

  std::string to_csv() const;
  std::string to_text() const;
};

/// Runs the five model variants (plus out-of-scope SVR/RFR markers) with
/// shared splits and seed across the requested horizons.
AblationReport ablate(const TimeSeriesFrame& frame,
                      const std::vector<std::size_t>& horizons,
                      const ForecasterConfig& base_config);

}  // namespace foodchain
