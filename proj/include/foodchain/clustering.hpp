#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "foodchain/rng.hpp"

namespace foodchain {

/// Penultimate-layer activation vector with its class label and the dataset
/// it came from.
struct LatentVector {
  std::vector<double> values;
  int label = 0;
  std::string origin;
};

struct Centroid {
  std::vector<double> values;
  int label = 0;
  std::string origin;
};

/// Labeled cluster centroids serving as a nearest-neighbor backward model.
struct CentroidSet {
  std::vector<Centroid> centroids;

  std::size_t size() const { return centroids.size(); }
  std::size_t dimension() const {
    return centroids.empty() ? 0 : centroids[0].values.size();
  }

  void save_file(const std::string& path) const;
  static CentroidSet load_file(const std::string& path);
};

double squared_distance(const std::vector<double>& a,
                        const std::vector<double>& b);

/// Within-cluster sum of squared distances to the nearest centroid.
double kmeans_cost(const std::vector<LatentVector>& vectors,
                   const CentroidSet& centroids);

/// k-means++ seeding followed by Lloyd iterations to an assignment fixed
/// point (or 300 iterations). Empty clusters are reseeded from the farthest
/// point. Each centroid is labeled by the majority class of its members.
/// If `cost_trace` is given it receives the objective after every Lloyd
/// iteration (non-increasing).
CentroidSet kmeans_fit(const std::vector<LatentVector>& vectors, std::size_t k,
                       std::uint64_t seed,
                       std::vector<double>* cost_trace = nullptr);

/// Label of the Euclidean-nearest centroid; ties break to the lowest index.
int classify_nearest(const std::vector<double>& query,
                     const CentroidSet& centroids);

/// Fraction of vectors whose nearest-centroid label matches their own.
double nearest_accuracy(const std::vector<LatentVector>& vectors,
                        const CentroidSet& centroids);

struct PruneStep {
  int removed_index = -1;  // index into the set at the time of removal
  std::string removed_origin;
  double accuracy = 0.0;
  std::size_t centroid_count = 0;
};

struct PruneTrace {
  std::vector<PruneStep> steps;  // steps[0] is the initial state
  std::vector<Centroid> adapted_before, adapted_after;

  std::string to_csv() const;
};

/// Iterative centroid pruning with adaptation: each round scores every
/// centroid by the validation accuracy obtained after removing it and
/// recomputing the survivors from their reassigned validation members; the
/// best removal is kept only if accuracy strictly improves. Stops at the
/// first non-improving removal or when only one centroid per class remains.
std::pair<CentroidSet, PruneTrace> prune_adapt(
    const CentroidSet& merged, const std::vector<LatentVector>& validation);

}  // namespace foodchain
