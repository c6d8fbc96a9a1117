#pragma once

#include <optional>
#include <string>
#include <vector>

#include "foodchain/mlp.hpp"
#include "foodchain/sgd.hpp"

namespace foodchain {

using FeatureMatrix = std::vector<std::vector<double>>;

/// Sum-of-RBF-kernels squared MMD, unbiased estimator, clamped at 0.
/// Empty `bandwidths` selects the median heuristic x {0.5, 1, 2}.
/// Single-sample batches fall back to the biased estimator (warning flag).
double mmd(const FeatureMatrix& source, const FeatureMatrix& target,
           std::vector<double> bandwidths = {}, bool* biased_fallback = nullptr);

/// Gradient of mmd() w.r.t. both feature matrices (bandwidths treated as
/// constants), accumulated into d_source/d_target.
double mmd_with_grad(const FeatureMatrix& source, const FeatureMatrix& target,
                     const std::vector<double>& bandwidths,
                     FeatureMatrix* d_source, FeatureMatrix* d_target);

/// Median pairwise Euclidean distance over the pooled batches.
double median_heuristic_bandwidth(const FeatureMatrix& a,
                                  const FeatureMatrix& b);

/// Squared Frobenius norm of the covariance difference, scaled by 1/(4 d^2).
double coral(const FeatureMatrix& source, const FeatureMatrix& target);
double coral_with_grad(const FeatureMatrix& source, const FeatureMatrix& target,
                       FeatureMatrix* d_source, FeatureMatrix* d_target);

/// Mean over unordered classifier pairs and samples of the L1 distance
/// between softmax outputs. A single classifier yields 0 (warning flag).
double class_discrepancy(const std::vector<FeatureMatrix>& classifier_outputs,
                         bool* single_classifier = nullptr);
double class_discrepancy_with_grad(
    const std::vector<FeatureMatrix>& classifier_outputs,
    std::vector<FeatureMatrix>* d_outputs);

// ---------------------------------------------------------------------------

/// Labeled feature batches per source domain plus the unlabeled target batch.
struct DomainBatch {
  std::vector<FeatureMatrix> source_features;
  std::vector<std::vector<int>> source_labels;
  FeatureMatrix target_features;
};

struct AdaptLossReport {
  double mmd = 0.0;
  double coral = 0.0;
  double fd = 0.0;  // mmd + coral
  double cd = 0.0;
  double cl = 0.0;
  double total = 0.0;  // fd + cd + cl
};

struct AdaptConfig {
  std::vector<std::size_t> trunk_sizes = {32};
  std::vector<std::size_t> branch_sizes = {16};
  std::size_t class_count = 2;
  double weight_fd = 1.0;  // the total loss is an unweighted sum by default
  double weight_cd = 1.0;
  double weight_cl = 1.0;
  std::vector<double> mmd_bandwidths;  // empty: median heuristic x {.5,1,2}
  SgdConfig sgd;
};

/// Shared dense trunk, one branch + softmax classifier per source domain.
class AdaptModel {
 public:
  AdaptModel() = default;
  AdaptModel(std::size_t feature_dim, std::size_t n_sources,
             const AdaptConfig& config, Rng& rng);

  void register_params(ParamSet& ps);

  std::size_t source_count() const { return branches_.size(); }

  /// Branch features for domain pair i (trunk then branch i).
  FeatureMatrix branch_features(std::size_t i, const FeatureMatrix& x) const;
  /// Softmax output of classifier i on a raw feature batch.
  FeatureMatrix classifier_softmax(std::size_t i, const FeatureMatrix& x) const;
  /// Mean of all classifiers' softmax outputs, argmax class per row.
  std::vector<int> predict(const FeatureMatrix& x) const;

  /// Computes Loss_TOTAL on one batch, accumulates all gradients, and
  /// returns the per-term report (identities hold exactly as computed).
  AdaptLossReport training_step_losses(const DomainBatch& batch);

  Mlp trunk;

 private:
  std::vector<Mlp> branches_;
  std::vector<DenseLayer> classifiers_;
  AdaptConfig config_;
};

struct MultiSourceResult {
  AdaptModel model;
  std::vector<AdaptLossReport> loss_curve;  // one entry per epoch (mean)
  double target_accuracy = 0.0;
  std::string loss_curve_csv() const;
};

struct LabeledDataset {
  FeatureMatrix features;
  std::vector<int> labels;
  std::string domain;
};

/// Multi-source adaptation trainer: per step samples one batch per source
/// (cycling the smaller domains) plus a target batch, and minimizes the
/// combined loss (feature discrepancy + class discrepancy + classification).
/// Held-out target labels are used only for the final accuracy evaluation.
MultiSourceResult train_multisource(const std::vector<LabeledDataset>& sources,
                                    const FeatureMatrix& target_unlabeled,
                                    const std::vector<int>& target_eval_labels,
                                    const AdaptConfig& config);

}  // namespace foodchain
