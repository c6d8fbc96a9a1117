#include "foodchain/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace foodchain {

double squared_distance(const std::vector<double>& a,
                        const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("latent dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

namespace {

std::size_t nearest_index(const std::vector<double>& query,
                          const CentroidSet& centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    double d = squared_distance(query, centroids.centroids[i].values);
    if (d < best_d) {  // strict: ties keep the lowest index
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

double kmeans_cost(const std::vector<LatentVector>& vectors,
                   const CentroidSet& centroids) {
  double cost = 0.0;
  for (const auto& v : vectors)
    cost += squared_distance(
        v.values, centroids.centroids[nearest_index(v.values, centroids)].values);
  return cost;
}

CentroidSet kmeans_fit(const std::vector<LatentVector>& vectors, std::size_t k,
                       std::uint64_t seed, std::vector<double>* cost_trace) {
  if (vectors.empty()) throw std::invalid_argument("kmeans_fit: empty input");
  if (k < 1 || k > vectors.size())
    throw std::invalid_argument("kmeans_fit: k must be in [1, N]");
  const std::size_t dim = vectors[0].values.size();
  for (const auto& v : vectors)
    if (v.values.size() != dim)
      throw std::invalid_argument("kmeans_fit: dimension mismatch");

  Rng rng(seed);
  CentroidSet cs;

  // k-means++ seeding
  std::uniform_int_distribution<std::size_t> first(0, vectors.size() - 1);
  cs.centroids.push_back({vectors[first(rng)].values, 0, ""});
  std::vector<double> d2(vectors.size());
  while (cs.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      d2[i] = squared_distance(
          vectors[i].values,
          cs.centroids[nearest_index(vectors[i].values, cs)].values);
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double r = uniform(rng, 0.0, total);
      double acc = 0.0;
      for (std::size_t i = 0; i < vectors.size(); ++i) {
        acc += d2[i];
        if (r <= acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);
    }
    cs.centroids.push_back({vectors[pick].values, 0, ""});
  }

  // Lloyd iterations
  std::vector<std::size_t> assign(vectors.size(), 0);
  for (int iter = 0; iter < 300; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      std::size_t a = nearest_index(vectors[i].values, cs);
      if (a != assign[i]) changed = true;
      assign[i] = a;
    }
    // recompute means
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      for (std::size_t d = 0; d < dim; ++d)
        sums[assign[i]][d] += vectors[i].values[d];
      ++counts[assign[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // reseed an empty cluster from the farthest point (deterministic)
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < vectors.size(); ++i) {
          double d = squared_distance(vectors[i].values,
                                      cs.centroids[assign[i]].values);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        cs.centroids[c].values = vectors[far].values;
        assign[far] = c;
        changed = true;
        continue;
      }
      for (std::size_t d = 0; d < dim; ++d)
        cs.centroids[c].values[d] =
            sums[c][d] / static_cast<double>(counts[c]);
    }
    double cost = kmeans_cost(vectors, cs);
    if (cost_trace) cost_trace->push_back(cost);
    if (!changed) break;  // assignment fixed point
  }

  // majority-class labels (ties to the smaller class id)
  for (std::size_t c = 0; c < k; ++c) {
    std::map<int, std::size_t> votes;
    for (std::size_t i = 0; i < vectors.size(); ++i)
      if (assign[i] == c) ++votes[vectors[i].label];
    int best_label = 0;
    std::size_t best_votes = 0;
    for (const auto& [label, n] : votes) {
      if (n > best_votes) {
        best_votes = n;
        best_label = label;
      }
    }
    cs.centroids[c].label = best_label;
  }
  return cs;
}

int classify_nearest(const std::vector<double>& query,
                     const CentroidSet& centroids) {
  if (centroids.size() == 0)
    throw std::invalid_argument("classify_nearest: empty centroid set");
  return centroids.centroids[nearest_index(query, centroids)].label;
}

double nearest_accuracy(const std::vector<LatentVector>& vectors,
                        const CentroidSet& centroids) {
  if (vectors.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& v : vectors)
    if (classify_nearest(v.values, centroids) == v.label) ++hits;
  return static_cast<double>(hits) / static_cast<double>(vectors.size());
}

// ---------------------------------------------------------------------------
// prune/adapt

namespace {

/// Reassigns validation members to the nearest centroid and recomputes every
/// centroid with members as the mean of its members; memberless centroids
/// stay constant. Labels and origins are preserved.
CentroidSet adapt(const CentroidSet& set,
                  const std::vector<LatentVector>& validation) {
  CentroidSet out = set;
  const std::size_t dim = set.dimension();
  std::vector<std::vector<double>> sums(set.size(),
                                        std::vector<double>(dim, 0.0));
  std::vector<std::size_t> counts(set.size(), 0);
  for (const auto& v : validation) {
    std::size_t a = nearest_index(v.values, set);
    for (std::size_t d = 0; d < dim; ++d) sums[a][d] += v.values[d];
    ++counts[a];
  }
  for (std::size_t c = 0; c < set.size(); ++c) {
    if (counts[c] == 0) continue;
    for (std::size_t d = 0; d < dim; ++d)
      out.centroids[c].values[d] = sums[c][d] / static_cast<double>(counts[c]);
  }
  return out;
}

double member_purity(const CentroidSet& set, std::size_t c,
                     const std::vector<LatentVector>& validation) {
  std::size_t members = 0, hits = 0;
  for (const auto& v : validation) {
    if (nearest_index(v.values, set) != c) continue;
    ++members;
    if (v.label == set.centroids[c].label) ++hits;
  }
  if (members == 0) return 0.0;  // a dead centroid is the least useful
  return static_cast<double>(hits) / static_cast<double>(members);
}

CentroidSet without(const CentroidSet& set, std::size_t idx) {
  CentroidSet out;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (i != idx) out.centroids.push_back(set.centroids[i]);
  return out;
}

}  // namespace

std::pair<CentroidSet, PruneTrace> prune_adapt(
    const CentroidSet& merged, const std::vector<LatentVector>& validation) {
  if (merged.size() == 0) throw std::invalid_argument("empty centroid set");
  if (validation.empty()) throw std::invalid_argument("empty validation set");

  std::set<int> centroid_classes, validation_classes;
  for (const auto& c : merged.centroids) centroid_classes.insert(c.label);
  for (const auto& v : validation) validation_classes.insert(v.label);
  for (int cls : centroid_classes)
    if (!validation_classes.count(cls))
      throw std::invalid_argument(
          "validation set missing class " + std::to_string(cls) +
          " present in the centroid set");

  CentroidSet current = merged;
  std::vector<std::size_t> orig_idx(merged.size());
  for (std::size_t i = 0; i < merged.size(); ++i) orig_idx[i] = i;

  PruneTrace trace;
  double accuracy = nearest_accuracy(validation, current);
  trace.steps.push_back({-1, "", accuracy, current.size()});

  while (current.size() > centroid_classes.size()) {
    // one-step lookahead: score every candidate removal after adaptation
    double best_acc = -1.0;
    double best_purity = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    CentroidSet best_set;
    for (std::size_t c = 0; c < current.size(); ++c) {
      CentroidSet candidate = adapt(without(current, c), validation);
      double acc = nearest_accuracy(validation, candidate);
      double purity = member_purity(current, c, validation);
      if (acc > best_acc || (acc == best_acc && purity < best_purity)) {
        best_acc = acc;
        best_purity = purity;
        best_idx = c;
        best_set = std::move(candidate);
      }
    }
    if (best_acc <= accuracy) break;  // first non-improving removal stops

    trace.steps.push_back({static_cast<int>(orig_idx[best_idx]),
                           current.centroids[best_idx].origin, best_acc,
                           best_set.size()});
    orig_idx.erase(orig_idx.begin() + static_cast<std::ptrdiff_t>(best_idx));
    current = std::move(best_set);
    accuracy = best_acc;
  }

  // survivors that moved are the "adapted" centroids
  for (std::size_t i = 0; i < current.size(); ++i) {
    const Centroid& before = merged.centroids[orig_idx[i]];
    if (squared_distance(current.centroids[i].values, before.values) > 0.0) {
      trace.adapted_before.push_back(before);
      trace.adapted_after.push_back(current.centroids[i]);
    }
  }
  return {std::move(current), std::move(trace)};
}

std::string PruneTrace::to_csv() const {
  std::ostringstream os;
  os << "iteration,removed_id,accuracy,centroid_count\n";
  char buf[64];
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", steps[i].accuracy);
    os << i << "," << steps[i].removed_index << "," << buf << ","
       << steps[i].centroid_count << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

void CentroidSet::save_file(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  os << "FCCS 1\n" << centroids.size() << " " << dimension() << "\n";
  char buf[64];
  for (const auto& c : centroids) {
    os << c.label << " " << (c.origin.empty() ? "-" : c.origin);
    for (double v : c.values) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      os << " " << buf;
    }
    os << "\n";
  }
}

CentroidSet CentroidSet::load_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for read: " + path);
  std::string magic;
  int version = 0;
  std::size_t n = 0, dim = 0;
  is >> magic >> version >> n >> dim;
  if (magic != "FCCS" || version != 1)
    throw std::runtime_error("bad centroid file: " + path);
  CentroidSet cs;
  for (std::size_t i = 0; i < n; ++i) {
    Centroid c;
    is >> c.label >> c.origin;
    if (c.origin == "-") c.origin.clear();
    c.values.resize(dim);
    for (double& v : c.values)
      if (!(is >> v)) throw std::runtime_error("truncated centroid file");
    cs.centroids.push_back(std::move(c));
  }
  return cs;
}

}  // namespace foodchain
