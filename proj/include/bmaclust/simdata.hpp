#pragma once

#include "bmaclust/types.hpp"

#include <cstdint>

namespace bmaclust {

/// Radius of a unit-variance cluster for the separation index (2 sigma).
inline constexpr double kClusterRadius = 2.0;

struct SimulatedData {
  FeatureMatrix x;
  Labels labels;   // 1-based true cluster of each row
  Matrix centres;  // K x D
};

/// Separation index of two clusters at centre distance `distance`:
/// (distance - 2r) / (distance + 2r) with r the cluster radius.
double separation_index(double distance, double radius = kClusterRadius);

/// Centre distance that achieves separation index `separation`.
double distance_for_separation(double separation, double radius = kClusterRadius);

/// Separation index of the closest pair of centres.
double nearest_pair_separation(const Matrix& centres, double radius = kClusterRadius);

/// k spherical unit-variance Gaussian clusters of n_per_cluster points in d
/// dimensions. Centres are added one at a time in a random direction from an
/// earlier centre, preferring compact layouts, so every cluster has a
/// neighbour at the requested separation index and none closer. Rows are
/// grouped by cluster.
SimulatedData generate_clusters(int n_per_cluster, int k, int d, double separation,
                                std::uint64_t seed);

}  // namespace bmaclust
