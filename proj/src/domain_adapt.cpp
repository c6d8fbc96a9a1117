#include "foodchain/domain_adapt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace foodchain {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double kernel_sum(double d2, const std::vector<double>& bw) {
  double k = 0.0;
  for (double s : bw) k += std::exp(-d2 / (2.0 * s * s));
  return k;
}

void check_batches(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("empty feature batch");
  std::size_t d = a[0].size();
  for (const auto& r : a)
    if (r.size() != d) throw std::invalid_argument("ragged feature batch");
  for (const auto& r : b)
    if (r.size() != d) throw std::invalid_argument("feature dimension mismatch");
}

}  // namespace

double median_heuristic_bandwidth(const FeatureMatrix& a,
                                  const FeatureMatrix& b) {
  FeatureMatrix pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<double> dists;
  for (std::size_t i = 0; i < pooled.size(); ++i)
    for (std::size_t j = i + 1; j < pooled.size(); ++j)
      dists.push_back(std::sqrt(sq_dist(pooled[i], pooled[j])));
  if (dists.empty()) return 1.0;
  std::nth_element(dists.begin(), dists.begin() + dists.size() / 2,
                   dists.end());
  double med = dists[dists.size() / 2];
  return med > 0.0 ? med : 1.0;
}

double mmd_with_grad(const FeatureMatrix& x, const FeatureMatrix& y,
                     const std::vector<double>& bandwidths, FeatureMatrix* dx,
                     FeatureMatrix* dy) {
  check_batches(x, y);
  const std::size_t m = x.size(), n = y.size(), d = x[0].size();
  const bool unbiased = m > 1 && n > 1;

  const double wxx = unbiased ? 1.0 / (static_cast<double>(m) * (m - 1))
                              : 1.0 / (static_cast<double>(m) * m);
  const double wyy = unbiased ? 1.0 / (static_cast<double>(n) * (n - 1))
                              : 1.0 / (static_cast<double>(n) * n);
  const double wxy = -2.0 / (static_cast<double>(m) * n);

  double value = 0.0;

  auto accumulate = [&](const std::vector<double>& a,
                        const std::vector<double>& b, double w,
                        std::vector<double>* da, std::vector<double>* db) {
    double d2 = sq_dist(a, b);
    for (double s : bandwidths) {
      double k = std::exp(-d2 / (2.0 * s * s));
      value += w * k;
      if (da) {
        double c = -w * k / (s * s);
        for (std::size_t t = 0; t < d; ++t) {
          double diff = a[t] - b[t];
          (*da)[t] += c * diff;
          if (db) (*db)[t] -= c * diff;
        }
      }
    }
  };

  if (dx) dx->assign(m, std::vector<double>(d, 0.0));
  if (dy) dy->assign(n, std::vector<double>(d, 0.0));

  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (unbiased && i == j) continue;
      if (i == j) {
        value += wxx * kernel_sum(0.0, bandwidths);
        continue;
      }
      accumulate(x[i], x[j], wxx, dx ? &(*dx)[i] : nullptr,
                 dx ? &(*dx)[j] : nullptr);
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (unbiased && i == j) continue;
      if (i == j) {
        value += wyy * kernel_sum(0.0, bandwidths);
        continue;
      }
      accumulate(y[i], y[j], wyy, dy ? &(*dy)[i] : nullptr,
                 dy ? &(*dy)[j] : nullptr);
    }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      accumulate(x[i], y[j], wxy, dx ? &(*dx)[i] : nullptr,
                 dy ? &(*dy)[j] : nullptr);

  if (value < 0.0) {
    // clamped at zero; the subgradient there is zero
    if (dx) dx->assign(m, std::vector<double>(d, 0.0));
    if (dy) dy->assign(n, std::vector<double>(d, 0.0));
    return 0.0;
  }
  return value;
}

double mmd(const FeatureMatrix& source, const FeatureMatrix& target,
           std::vector<double> bandwidths, bool* biased_fallback) {
  check_batches(source, target);
  if (bandwidths.empty()) {
    double med = median_heuristic_bandwidth(source, target);
    bandwidths = {0.5 * med, med, 2.0 * med};
  }
  if (biased_fallback)
    *biased_fallback = source.size() < 2 || target.size() < 2;
  return mmd_with_grad(source, target, bandwidths, nullptr, nullptr);
}

// ---------------------------------------------------------------------------

namespace {

/// Covariance with 1/(n-1) normalization; rows are samples.
std::vector<std::vector<double>> covariance(const FeatureMatrix& x) {
  const std::size_t n = x.size(), d = x[0].size();
  std::vector<double> mean(d, 0.0);
  for (const auto& row : x)
    for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
  for (double& m : mean) m /= static_cast<double>(n);
  std::vector<std::vector<double>> c(d, std::vector<double>(d, 0.0));
  for (const auto& row : x)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        c[a][b] += (row[a] - mean[a]) * (row[b] - mean[b]);
  for (auto& r : c)
    for (double& v : r) v /= static_cast<double>(n - 1);
  return c;
}

}  // namespace

double coral_with_grad(const FeatureMatrix& x, const FeatureMatrix& y,
                       FeatureMatrix* dx, FeatureMatrix* dy) {
  check_batches(x, y);
  if (x.size() < 2 || y.size() < 2)
    throw std::invalid_argument("coral needs at least 2 samples per batch");
  const std::size_t d = x[0].size();
  auto cs = covariance(x);
  auto ct = covariance(y);

  double loss = 0.0;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      double diff = cs[a][b] - ct[a][b];
      loss += diff * diff;
    }
  const double scale = 1.0 / (4.0 * static_cast<double>(d) * d);
  loss *= scale;

  auto fill_grad = [&](const FeatureMatrix& z, double sign, FeatureMatrix* dz) {
    if (!dz) return;
    const std::size_t n = z.size();
    std::vector<double> mean(d, 0.0);
    for (const auto& row : z)
      for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
    for (double& m : mean) m /= static_cast<double>(n);
    // dL/dC = sign * (Cs - Ct) * 2*scale ; dL/dXc = 2 Xc (dL/dC) / (n-1)
    dz->assign(n, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t a = 0; a < d; ++a) {
        double g = 0.0;
        for (std::size_t b = 0; b < d; ++b)
          g += (z[i][b] - mean[b]) * (cs[b][a] - ct[b][a]);
        (*dz)[i][a] = sign * 4.0 * scale * g / static_cast<double>(n - 1);
      }
    // centering projection: subtract the column means of the raw gradient
    std::vector<double> gmean(d, 0.0);
    for (const auto& row : *dz)
      for (std::size_t j = 0; j < d; ++j) gmean[j] += row[j];
    for (double& m : gmean) m /= static_cast<double>(n);
    for (auto& row : *dz)
      for (std::size_t j = 0; j < d; ++j) row[j] -= gmean[j];
  };
  fill_grad(x, 1.0, dx);
  fill_grad(y, -1.0, dy);
  return loss;
}

double coral(const FeatureMatrix& source, const FeatureMatrix& target) {
  return coral_with_grad(source, target, nullptr, nullptr);
}

// ---------------------------------------------------------------------------

double class_discrepancy_with_grad(
    const std::vector<FeatureMatrix>& outputs,
    std::vector<FeatureMatrix>* d_outputs) {
  const std::size_t K = outputs.size();
  if (K == 0) throw std::invalid_argument("no classifier outputs");
  const std::size_t n = outputs[0].size();
  for (const auto& o : outputs)
    if (o.size() != n)
      throw std::invalid_argument("classifier output row counts differ");
  if (d_outputs) {
    d_outputs->assign(K, FeatureMatrix());
    for (std::size_t k = 0; k < K; ++k)
      (*d_outputs)[k].assign(n, std::vector<double>(outputs[0][0].size(), 0.0));
  }
  if (K < 2) return 0.0;

  const double pairs = static_cast<double>(K * (K - 1) / 2);
  const double norm = 1.0 / (pairs * static_cast<double>(n));
  double value = 0.0;
  for (std::size_t a = 0; a < K; ++a)
    for (std::size_t b = a + 1; b < K; ++b)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < outputs[a][i].size(); ++c) {
          double diff = outputs[a][i][c] - outputs[b][i][c];
          value += std::abs(diff) * norm;
          if (d_outputs) {
            double s = (diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0)) * norm;
            (*d_outputs)[a][i][c] += s;
            (*d_outputs)[b][i][c] -= s;
          }
        }
  return value;
}

double class_discrepancy(const std::vector<FeatureMatrix>& classifier_outputs,
                         bool* single_classifier) {
  if (single_classifier) *single_classifier = classifier_outputs.size() < 2;
  return class_discrepancy_with_grad(classifier_outputs, nullptr);
}

// ---------------------------------------------------------------------------
// AdaptModel

namespace {

FeatureMatrix softmax_rows(const FeatureMatrix& logits) {
  FeatureMatrix p = logits;
  for (auto& row : p) {
    double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double& v : row) {
      v = std::exp(v - mx);
      z += v;
    }
    for (double& v : row) v /= z;
  }
  return p;
}

/// dL/dlogits given dL/dp for softmax rows.
FeatureMatrix softmax_backward_rows(const FeatureMatrix& p,
                                    const FeatureMatrix& dp) {
  FeatureMatrix dl = p;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double dot = 0.0;
    for (std::size_t c = 0; c < p[i].size(); ++c) dot += dp[i][c] * p[i][c];
    for (std::size_t c = 0; c < p[i].size(); ++c)
      dl[i][c] = p[i][c] * (dp[i][c] - dot);
  }
  return dl;
}

}  // namespace

AdaptModel::AdaptModel(std::size_t feature_dim, std::size_t n_sources,
                       const AdaptConfig& config, Rng& rng)
    : config_(config) {
  if (n_sources < 1) throw std::invalid_argument("need at least one source");
  std::vector<std::size_t> trunk_hidden(config.trunk_sizes.begin(),
                                        config.trunk_sizes.end() - 1);
  trunk = Mlp(feature_dim, trunk_hidden, config.trunk_sizes.back(), rng,
              Activation::relu, Activation::relu);
  for (std::size_t i = 0; i < n_sources; ++i) {
    std::vector<std::size_t> branch_hidden(config.branch_sizes.begin(),
                                           config.branch_sizes.end() - 1);
    branches_.emplace_back(config.trunk_sizes.back(), branch_hidden,
                           config.branch_sizes.back(), rng, Activation::relu,
                           Activation::relu);
    classifiers_.emplace_back(config.branch_sizes.back(), config.class_count,
                              Activation::linear, rng);
  }
}

void AdaptModel::register_params(ParamSet& ps) {
  trunk.register_params(ps, "trunk");
  for (std::size_t i = 0; i < branches_.size(); ++i) {
    branches_[i].register_params(ps, "branch" + std::to_string(i));
    classifiers_[i].register_params(ps, "clf" + std::to_string(i));
  }
}

FeatureMatrix AdaptModel::branch_features(std::size_t i,
                                          const FeatureMatrix& x) const {
  return branches_[i].forward(trunk.forward(x));
}

FeatureMatrix AdaptModel::classifier_softmax(std::size_t i,
                                             const FeatureMatrix& x) const {
  return softmax_rows(classifiers_[i].forward(branch_features(i, x)));
}

std::vector<int> AdaptModel::predict(const FeatureMatrix& x) const {
  FeatureMatrix mean;
  for (std::size_t i = 0; i < branches_.size(); ++i) {
    FeatureMatrix p = classifier_softmax(i, x);
    if (mean.empty()) {
      mean = std::move(p);
    } else {
      for (std::size_t r = 0; r < mean.size(); ++r)
        for (std::size_t c = 0; c < mean[r].size(); ++c)
          mean[r][c] += p[r][c];
    }
  }
  std::vector<int> labels(x.size());
  for (std::size_t r = 0; r < mean.size(); ++r)
    labels[r] = static_cast<int>(
        std::max_element(mean[r].begin(), mean[r].end()) - mean[r].begin());
  return labels;
}

AdaptLossReport AdaptModel::training_step_losses(const DomainBatch& batch) {
  const std::size_t S = branches_.size();
  if (batch.source_features.size() != S || batch.source_labels.size() != S)
    throw std::invalid_argument("source batch count mismatch");
  if (batch.target_features.empty())
    throw std::invalid_argument("empty target batch");

  AdaptLossReport report;
  const double inv_s = 1.0 / static_cast<double>(S);

  struct Pass {
    Mlp::Cache trunk_src, trunk_tgt, branch_src, branch_tgt;
    FeatureMatrix trunk_src_out, trunk_tgt_out;
    FeatureMatrix feat_src, feat_tgt;
    FeatureMatrix src_probs, tgt_probs;
    FeatureMatrix src_logits, tgt_logits;
    FeatureMatrix d_feat_src, d_feat_tgt;
  };
  std::vector<Pass> passes(S);

  std::vector<FeatureMatrix> target_probs(S);
  for (std::size_t i = 0; i < S; ++i) {
    Pass& p = passes[i];
    p.trunk_src_out = trunk.forward(batch.source_features[i], &p.trunk_src);
    p.feat_src = branches_[i].forward(p.trunk_src_out, &p.branch_src);
    p.trunk_tgt_out = trunk.forward(batch.target_features, &p.trunk_tgt);
    p.feat_tgt = branches_[i].forward(p.trunk_tgt_out, &p.branch_tgt);
    p.src_logits = classifiers_[i].forward(p.feat_src);
    p.src_probs = softmax_rows(p.src_logits);
    p.tgt_logits = classifiers_[i].forward(p.feat_tgt);
    p.tgt_probs = softmax_rows(p.tgt_logits);
    target_probs[i] = p.tgt_probs;

    std::vector<double> bw = config_.mmd_bandwidths;
    if (bw.empty()) {
      double med = median_heuristic_bandwidth(p.feat_src, p.feat_tgt);
      bw = {0.5 * med, med, 2.0 * med};
    }
    FeatureMatrix dms, dmt, dcs, dct;
    report.mmd += inv_s * mmd_with_grad(p.feat_src, p.feat_tgt, bw, &dms, &dmt);
    report.coral += inv_s * coral_with_grad(p.feat_src, p.feat_tgt, &dcs, &dct);

    p.d_feat_src.assign(p.feat_src.size(),
                        std::vector<double>(p.feat_src[0].size(), 0.0));
    p.d_feat_tgt.assign(p.feat_tgt.size(),
                        std::vector<double>(p.feat_tgt[0].size(), 0.0));
    double wfd = config_.weight_fd * inv_s;
    for (std::size_t r = 0; r < p.feat_src.size(); ++r)
      for (std::size_t c = 0; c < p.feat_src[r].size(); ++c)
        p.d_feat_src[r][c] += wfd * (dms[r][c] + dcs[r][c]);
    for (std::size_t r = 0; r < p.feat_tgt.size(); ++r)
      for (std::size_t c = 0; c < p.feat_tgt[r].size(); ++c)
        p.d_feat_tgt[r][c] += wfd * (dmt[r][c] + dct[r][c]);

    // classification loss: mean cross-entropy on the source batch
    const auto& labels = batch.source_labels[i];
    if (labels.size() != p.src_probs.size())
      throw std::invalid_argument("source label count mismatch");
    double ce = 0.0;
    FeatureMatrix d_logits(p.src_probs.size(),
                           std::vector<double>(config_.class_count, 0.0));
    for (std::size_t r = 0; r < p.src_probs.size(); ++r) {
      int y = labels[r];
      if (y < 0 || static_cast<std::size_t>(y) >= config_.class_count)
        throw std::invalid_argument("label out of range");
      ce -= std::log(std::max(p.src_probs[r][y], 1e-300));
      for (std::size_t c = 0; c < config_.class_count; ++c)
        d_logits[r][c] = (p.src_probs[r][c] - (static_cast<int>(c) == y)) /
                         static_cast<double>(p.src_probs.size());
    }
    ce /= static_cast<double>(p.src_probs.size());
    report.cl += inv_s * ce;

    double wcl = config_.weight_cl * inv_s;
    for (auto& row : d_logits)
      for (double& v : row) v *= wcl;
    FeatureMatrix d_from_clf =
        classifiers_[i].backward(d_logits, p.feat_src, p.src_logits);
    for (std::size_t r = 0; r < p.d_feat_src.size(); ++r)
      for (std::size_t c = 0; c < p.d_feat_src[r].size(); ++c)
        p.d_feat_src[r][c] += d_from_clf[r][c];
  }

  // class boundary discrepancy on the target batch
  std::vector<FeatureMatrix> d_probs;
  report.cd = class_discrepancy_with_grad(target_probs, &d_probs);
  for (std::size_t i = 0; i < S; ++i) {
    Pass& p = passes[i];
    for (auto& row : d_probs[i])
      for (double& v : row) v *= config_.weight_cd;
    FeatureMatrix d_logits = softmax_backward_rows(p.tgt_probs, d_probs[i]);
    FeatureMatrix d_from_clf =
        classifiers_[i].backward(d_logits, p.feat_tgt, p.tgt_logits);
    for (std::size_t r = 0; r < p.d_feat_tgt.size(); ++r)
      for (std::size_t c = 0; c < p.d_feat_tgt[r].size(); ++c)
        p.d_feat_tgt[r][c] += d_from_clf[r][c];

    FeatureMatrix d_trunk_src = branches_[i].backward(p.d_feat_src, p.branch_src);
    trunk.backward(d_trunk_src, p.trunk_src);
    FeatureMatrix d_trunk_tgt = branches_[i].backward(p.d_feat_tgt, p.branch_tgt);
    trunk.backward(d_trunk_tgt, p.trunk_tgt);
  }

  report.fd = report.mmd + report.coral;
  report.total = report.fd + report.cd + report.cl;
  return report;
}

// ---------------------------------------------------------------------------
// trainer

std::string MultiSourceResult::loss_curve_csv() const {
  std::ostringstream os;
  os << "epoch,loss_mmd,loss_coral,loss_fd,loss_cd,loss_cl,loss_total\n";
  char buf[64];
  for (std::size_t e = 0; e < loss_curve.size(); ++e) {
    const auto& r = loss_curve[e];
    os << e;
    for (double v : {r.mmd, r.coral, r.fd, r.cd, r.cl, r.total}) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      os << "," << buf;
    }
    os << "\n";
  }
  return os.str();
}

MultiSourceResult train_multisource(const std::vector<LabeledDataset>& sources,
                                    const FeatureMatrix& target_unlabeled,
                                    const std::vector<int>& target_eval_labels,
                                    const AdaptConfig& config) {
  if (sources.empty()) throw std::invalid_argument("need at least one source");
  for (const auto& s : sources)
    if (s.features.empty() || s.features.size() != s.labels.size())
      throw std::invalid_argument("bad source dataset: " + s.domain);
  if (target_unlabeled.empty())
    throw std::invalid_argument("empty target dataset");
  config.sgd.validate();

  const std::size_t S = sources.size();
  const std::size_t dim = sources[0].features[0].size();

  Rng rng(config.sgd.seed);
  MultiSourceResult result;
  result.model = AdaptModel(dim, S, config, rng);
  ParamSet ps;
  result.model.register_params(ps);

  // cycling index streams; smaller domains wrap around
  struct Stream {
    std::vector<std::size_t> order;
    std::size_t pos = 0;
  };
  auto make_stream = [&](std::size_t n) {
    Stream st;
    st.order.resize(n);
    std::iota(st.order.begin(), st.order.end(), 0);
    std::shuffle(st.order.begin(), st.order.end(), rng);
    return st;
  };
  std::vector<Stream> src_streams;
  for (const auto& s : sources) src_streams.push_back(make_stream(s.features.size()));
  Stream tgt_stream = make_stream(target_unlabeled.size());

  auto draw = [&](Stream& st, std::size_t n) {
    std::vector<std::size_t> idx;
    idx.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      if (st.pos == st.order.size()) {
        std::shuffle(st.order.begin(), st.order.end(), rng);
        st.pos = 0;
      }
      idx.push_back(st.order[st.pos++]);
    }
    return idx;
  };

  std::size_t largest = target_unlabeled.size();
  for (const auto& s : sources) largest = std::max(largest, s.features.size());
  std::size_t steps_per_epoch =
      (largest + config.sgd.batch_size - 1) / config.sgd.batch_size;

  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.sgd.epochs; ++epoch) {
    AdaptLossReport mean{};
    for (std::size_t s = 0; s < steps_per_epoch; ++s, ++step) {
      DomainBatch batch;
      for (std::size_t i = 0; i < S; ++i) {
        std::size_t n = std::min(config.sgd.batch_size, sources[i].features.size());
        auto idx = draw(src_streams[i], n);
        FeatureMatrix f;
        std::vector<int> l;
        for (std::size_t j : idx) {
          f.push_back(sources[i].features[j]);
          l.push_back(sources[i].labels[j]);
        }
        batch.source_features.push_back(std::move(f));
        batch.source_labels.push_back(std::move(l));
      }
      std::size_t tn = std::min(config.sgd.batch_size, target_unlabeled.size());
      for (std::size_t j : draw(tgt_stream, tn))
        batch.target_features.push_back(target_unlabeled[j]);

      AdaptLossReport r = result.model.training_step_losses(batch);
      if (!std::isfinite(r.total))
        throw std::runtime_error("adaptation diverged at step " +
                                 std::to_string(step));
      sgd_step(ps, config.sgd);
      mean.mmd += r.mmd;
      mean.coral += r.coral;
      mean.fd += r.fd;
      mean.cd += r.cd;
      mean.cl += r.cl;
      mean.total += r.total;
    }
    double inv = 1.0 / static_cast<double>(steps_per_epoch);
    mean.mmd *= inv;
    mean.coral *= inv;
    mean.fd *= inv;
    mean.cd *= inv;
    mean.cl *= inv;
    mean.total *= inv;
    result.loss_curve.push_back(mean);
  }

  if (!target_eval_labels.empty()) {
    if (target_eval_labels.size() != target_unlabeled.size())
      throw std::invalid_argument("target eval label count mismatch");
    auto pred = result.model.predict(target_unlabeled);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (pred[i] == target_eval_labels[i]) ++hits;
    result.target_accuracy =
        static_cast<double>(hits) / static_cast<double>(pred.size());
  }
  return result;
}

}  // namespace foodchain
