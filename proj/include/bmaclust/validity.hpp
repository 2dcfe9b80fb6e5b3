#pragma once

#include "bmaclust/types.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bmaclust {

/// Internal validation indices for one crisp partition. CH and XB use squared
/// Euclidean distances; Dunn, silhouette and Davies-Bouldin use plain
/// Euclidean distances.
struct IndexReport {
  double ch = 0.0;  // +infinity when the within-cluster sum of squares is 0
  double xb = 0.0;
  double dunn = 0.0;
  double silhouette = 0.0;
  double davies_bouldin = 0.0;
  int k = 0;
  Eigen::Index n = 0;
  Matrix centroids;         // K x D
  Vector overall_centroid;  // D
  std::vector<Eigen::Index> cluster_sizes;
};

/// Labels compacted to 0..K-1 with empty clusters dropped, plus per-cluster
/// statistics shared by every index.
struct Partition {
  std::vector<int> index;  // 0-based cluster of each observation
  int k = 0;
  Matrix centroids;
  Vector overall_centroid;
  std::vector<Eigen::Index> sizes;
  double within_ss = 0.0;   // sum_k sum_{y in k} d^2(y, c_k)
  double between_ss = 0.0;  // sum_k n_k d^2(c, c_k)
};

Partition make_partition(const FeatureMatrix& x, std::span<const int> labels);

double calinski_harabasz(const FeatureMatrix& x, std::span<const int> labels);
double xie_beni(const FeatureMatrix& x, std::span<const int> labels);
IndexReport auxiliary_indices(const FeatureMatrix& x, std::span<const int> labels);

using Clusterer = std::function<Labels(const FeatureMatrix&, int k)>;

struct ScanRow {
  int k = 0;
  std::optional<IndexReport> report;  // empty when the clusterer or an index failed
  std::string error;
};

/// Runs the clusterer for every k in [k_min, k_max] and scores each crisp
/// result. Rows are returned in increasing k.
std::vector<ScanRow> index_scan(const FeatureMatrix& x, const Clusterer& clusterer, int k_min,
                                int k_max);

}  // namespace bmaclust
