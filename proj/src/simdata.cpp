#include "bmaclust/simdata.hpp"

#include "bmaclust/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bmaclust {
namespace {

constexpr int kPlacementAttempts = 1000;
constexpr int kCandidates = 50;

double min_pair_distance(const Matrix& centres) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < centres.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < centres.rows(); ++b) {
      best = std::min(best, (centres.row(a) - centres.row(b)).norm());
    }
  }
  return best;
}

}  // namespace

double separation_index(double distance, double radius) {
  return (distance - 2.0 * radius) / (distance + 2.0 * radius);
}

double distance_for_separation(double separation, double radius) {
  return 2.0 * radius * (1.0 + separation) / (1.0 - separation);
}

double nearest_pair_separation(const Matrix& centres, double radius) {
  return separation_index(min_pair_distance(centres), radius);
}

SimulatedData generate_clusters(int n_per_cluster, int k, int d, double separation,
                                std::uint64_t seed) {
  if (n_per_cluster < 1 || k < 1 || d < 1) {
    throw BmaError(ErrorCode::InvalidArgument, "n_per_cluster, k and d must all be >= 1");
  }
  if (!(separation >= -1.0 && separation <= 1.0)) {
    throw BmaError(ErrorCode::InvalidArgument, "separation must lie in [-1, 1]");
  }
  if (static_cast<long long>(n_per_cluster) * k < 2) {
    throw BmaError(ErrorCode::InvalidArgument, "need at least 2 observations in total");
  }
  if (k > 1 && separation >= 1.0) {
    throw BmaError(ErrorCode::InfeasibleGeometry, "separation 1 needs infinitely distant centres");
  }

  Rng rng(seed);

  // Unit layout: each new centre sits at distance 1 from a randomly chosen
  // earlier centre, in a random direction, and no closer than 1 to any other.
  // Of the first kCandidates valid positions the one nearest the existing
  // centres is kept, which packs clusters into a clump. Scaling by the target
  // distance then gives every cluster a neighbour at exactly the requested
  // separation.
  Matrix centres = Matrix::Zero(k, d);
  for (int c = 1; c < k; ++c) {
    Eigen::RowVectorXd best(d);
    double best_spread = std::numeric_limits<double>::infinity();
    int valid = 0;
    for (int attempt = 0; attempt < kPlacementAttempts && valid < kCandidates; ++attempt) {
      const int parent = std::min(c - 1, static_cast<int>(uniform01(rng) * c));
      Eigen::RowVectorXd dir(d);
      for (int j = 0; j < d; ++j) dir(j) = standard_normal(rng);
      const double len = dir.norm();
      if (!(len > 0.0)) continue;
      const Eigen::RowVectorXd candidate = centres.row(parent) + dir / len;
      bool ok = true;
      double spread = 0.0;
      for (int prev = 0; prev < c && ok; ++prev) {
        const double dist = (candidate - centres.row(prev)).norm();
        ok = dist >= 1.0 - 1e-12;
        spread += dist;
      }
      if (!ok) continue;
      ++valid;
      if (spread < best_spread) {
        best_spread = spread;
        best = candidate;
      }
    }
    if (valid == 0) {
      throw BmaError(ErrorCode::InfeasibleGeometry,
                     "could not place centre " + std::to_string(c + 1) + " of " + std::to_string(k) +
                         " in " + std::to_string(d) + " dimensions");
    }
    centres.row(c) = best;
  }
  centres.rowwise() -= Eigen::RowVectorXd(centres.colwise().mean());
  centres *= k > 1 ? distance_for_separation(separation) : 0.0;

  const Eigen::Index n = static_cast<Eigen::Index>(n_per_cluster) * k;
  Matrix values(n, d);
  Labels labels(static_cast<std::size_t>(n));
  Eigen::Index row = 0;
  for (int c = 0; c < k; ++c) {
    for (int p = 0; p < n_per_cluster; ++p, ++row) {
      for (int j = 0; j < d; ++j) values(row, j) = centres(c, j) + standard_normal(rng);
      labels[static_cast<std::size_t>(row)] = c + 1;
    }
  }
  return SimulatedData{FeatureMatrix(std::move(values)), std::move(labels), std::move(centres)};
}

}  // namespace bmaclust
