#include "bmaclust/validity.hpp"

#include "bmaclust/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace bmaclust {
namespace {

constexpr double kCoincidentThreshold = 1e-12;

void require_valid(const Partition& p, Eigen::Index n) {
  if (p.k < 2) {
    throw BmaError(ErrorCode::TooFewClusters,
                   "validity index needs at least 2 non-empty clusters, got " + std::to_string(p.k));
  }
  if (n <= p.k) {
    throw BmaError(ErrorCode::TooFewPoints, "validity index needs N > K (N=" + std::to_string(n) +
                                                ", K=" + std::to_string(p.k) + ")");
  }
}

double min_centroid_sq_distance(const Partition& p) {
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < p.k; ++a) {
    for (int b = a + 1; b < p.k; ++b) {
      best = std::min(best, (p.centroids.row(a) - p.centroids.row(b)).squaredNorm());
    }
  }
  return best;
}

double ch_from_partition(const Partition& p, Eigen::Index n) {
  require_valid(p, n);
  if (p.within_ss == 0.0) return std::numeric_limits<double>::infinity();
  const double between = p.between_ss / static_cast<double>(p.k - 1);
  const double within = p.within_ss / static_cast<double>(n - p.k);
  return between / within;
}

double xb_from_partition(const Partition& p, Eigen::Index n) {
  if (p.k < 2) {
    throw BmaError(ErrorCode::TooFewClusters,
                   "Xie-Beni needs at least 2 non-empty clusters, got " + std::to_string(p.k));
  }
  const double sep = min_centroid_sq_distance(p);
  if (sep < kCoincidentThreshold) {
    throw BmaError(ErrorCode::CoincidentCentroids,
                   "minimum squared centroid distance " + std::to_string(sep));
  }
  return p.within_ss / (static_cast<double>(n) * sep);
}

}  // namespace

Partition make_partition(const FeatureMatrix& x, std::span<const int> labels) {
  const Matrix& v = x.values();
  if (static_cast<Eigen::Index>(labels.size()) != x.n()) {
    throw BmaError(ErrorCode::DimensionMismatch, std::to_string(labels.size()) + " labels for " +
                                                     std::to_string(x.n()) + " observations");
  }
  std::map<int, int> compact;
  for (int l : labels) compact.emplace(l, 0);
  int next = 0;
  for (auto& [label, idx] : compact) idx = next++;

  Partition p;
  p.k = next;
  p.index.resize(labels.size());
  p.sizes.assign(static_cast<std::size_t>(p.k), 0);
  p.centroids = Matrix::Zero(p.k, x.d());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int c = compact.at(labels[i]);
    p.index[i] = c;
    ++p.sizes[static_cast<std::size_t>(c)];
    p.centroids.row(c) += v.row(static_cast<Eigen::Index>(i));
  }
  for (int c = 0; c < p.k; ++c) {
    p.centroids.row(c) /= static_cast<double>(p.sizes[static_cast<std::size_t>(c)]);
  }
  p.overall_centroid = v.colwise().mean().transpose();

  for (std::size_t i = 0; i < labels.size(); ++i) {
    p.within_ss += (v.row(static_cast<Eigen::Index>(i)) - p.centroids.row(p.index[i])).squaredNorm();
  }
  for (int c = 0; c < p.k; ++c) {
    p.between_ss += static_cast<double>(p.sizes[static_cast<std::size_t>(c)]) *
                    (p.centroids.row(c).transpose() - p.overall_centroid).squaredNorm();
  }
  return p;
}

double calinski_harabasz(const FeatureMatrix& x, std::span<const int> labels) {
  return ch_from_partition(make_partition(x, labels), x.n());
}

double xie_beni(const FeatureMatrix& x, std::span<const int> labels) {
  return xb_from_partition(make_partition(x, labels), x.n());
}

IndexReport auxiliary_indices(const FeatureMatrix& x, std::span<const int> labels) {
  const Partition p = make_partition(x, labels);
  const Eigen::Index n = x.n();
  require_valid(p, n);

  IndexReport r;
  r.k = p.k;
  r.n = n;
  r.centroids = p.centroids;
  r.overall_centroid = p.overall_centroid;
  r.cluster_sizes = p.sizes;
  r.ch = ch_from_partition(p, n);
  r.xb = xb_from_partition(p, n);

  Matrix dist;
  kernels::parallel::pairwise_distances(x.values(), dist);

  // Dunn: closest pair across clusters over the widest cluster diameter.
  double min_inter = std::numeric_limits<double>::infinity();
  double max_intra = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (p.index[static_cast<std::size_t>(i)] == p.index[static_cast<std::size_t>(j)]) {
        max_intra = std::max(max_intra, dist(i, j));
      } else {
        min_inter = std::min(min_inter, dist(i, j));
      }
    }
  }
  r.dunn = max_intra > 0.0 ? min_inter / max_intra : std::numeric_limits<double>::infinity();

  // Silhouette, singletons contribute 0.
  double sil_total = 0.0;
  std::vector<double> per_cluster(static_cast<std::size_t>(p.k));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int own = p.index[static_cast<std::size_t>(i)];
    if (p.sizes[static_cast<std::size_t>(own)] < 2) continue;
    std::fill(per_cluster.begin(), per_cluster.end(), 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      per_cluster[static_cast<std::size_t>(p.index[static_cast<std::size_t>(j)])] += dist(i, j);
    }
    const double a = per_cluster[static_cast<std::size_t>(own)] /
                     static_cast<double>(p.sizes[static_cast<std::size_t>(own)] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < p.k; ++c) {
      if (c == own) continue;
      b = std::min(b, per_cluster[static_cast<std::size_t>(c)] /
                          static_cast<double>(p.sizes[static_cast<std::size_t>(c)]));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) sil_total += (b - a) / denom;
  }
  r.silhouette = sil_total / static_cast<double>(n);

  // Davies-Bouldin with sigma_k = mean distance to the centroid.
  std::vector<double> sigma(static_cast<std::size_t>(p.k), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = p.index[static_cast<std::size_t>(i)];
    sigma[static_cast<std::size_t>(c)] += (x.values().row(i) - p.centroids.row(c)).norm();
  }
  for (int c = 0; c < p.k; ++c) {
    sigma[static_cast<std::size_t>(c)] /= static_cast<double>(p.sizes[static_cast<std::size_t>(c)]);
  }
  double db_total = 0.0;
  for (int a = 0; a < p.k; ++a) {
    double worst = 0.0;
    for (int b = 0; b < p.k; ++b) {
      if (a == b) continue;
      const double sep = (p.centroids.row(a) - p.centroids.row(b)).norm();
      worst = std::max(worst, (sigma[static_cast<std::size_t>(a)] + sigma[static_cast<std::size_t>(b)]) / sep);
    }
    db_total += worst;
  }
  r.davies_bouldin = db_total / static_cast<double>(p.k);
  return r;
}

std::vector<ScanRow> index_scan(const FeatureMatrix& x, const Clusterer& clusterer, int k_min,
                                int k_max) {
  if (k_min < 2 || k_max > x.n() - 1 || k_min > k_max) {
    throw BmaError(ErrorCode::InvalidK, "k range [" + std::to_string(k_min) + ", " +
                                            std::to_string(k_max) + "] must lie within [2, " +
                                            std::to_string(x.n() - 1) + "]");
  }
  std::vector<ScanRow> rows(static_cast<std::size_t>(k_max - k_min + 1));
  const int count = static_cast<int>(rows.size());
#pragma omp parallel for schedule(dynamic)
  for (int idx = 0; idx < count; ++idx) {
    ScanRow& row = rows[static_cast<std::size_t>(idx)];
    row.k = k_min + idx;
    try {
      const Labels labels = clusterer(x, row.k);
      row.report = auxiliary_indices(x, labels);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }
  return rows;
}

}  // namespace bmaclust
