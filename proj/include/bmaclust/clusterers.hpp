#pragma once

#include "bmaclust/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bmaclust {

struct KMeansOptions {
  int restarts = 10;
  int max_iter = 100;
};

struct KMeansFit {
  Labels labels;                // 1-based
  Matrix centroids;             // K x D
  double within_ss = 0.0;
  std::vector<double> ss_trace; // within-SS after each Lloyd step of the winning restart
  int best_restart = 0;
};

/// Lloyd's algorithm from k-means++ seeding; the restart with the lowest
/// within-cluster sum of squares wins (ties to the earlier restart).
KMeansFit kmeans_fit(const FeatureMatrix& x, int k, std::uint64_t seed,
                     const KMeansOptions& opts = {});
AllocationMatrix kmeans(const FeatureMatrix& x, int k, std::uint64_t seed,
                        const std::string& model_id = "kmeans");

struct Merge {
  int a = 0;  // representative (smallest) observation index of each side, 0-based
  int b = 0;
  double height = 0.0;
};

/// Full Ward (ward.D2) agglomeration: N-1 merges in order.
std::vector<Merge> ward_tree(const FeatureMatrix& x);

/// Labels for the partition with k clusters; clusters numbered by first
/// appearance in observation order.
Labels cut_tree(const std::vector<Merge>& merges, Eigen::Index n, int k);

AllocationMatrix ward_hclust(const FeatureMatrix& x, int k, const std::string& model_id = "hclust");

struct GmmOptions {
  int max_iter = 500;
  double tol = 1e-8;
  double variance_floor_scale = 1e-6;
};

struct GmmFit {
  Matrix responsibilities;  // N x K
  Matrix means;             // K x D
  Matrix variances;         // K x D
  Vector mixing;            // K
  double loglik = 0.0;
  int kappa = 0;            // K*2D + (K-1)
  Eigen::Index n = 0;
  double bic = 0.0;         // 2 loglik - kappa log N
  std::vector<double> loglik_trace;
  bool converged = false;

  AllocationMatrix allocation(const std::string& model_id) const;
};

int gmm_parameter_count(int k, Eigen::Index d);
double bic_score(double loglik, int kappa, Eigen::Index n);

/// EM for a diagonal-covariance Gaussian mixture, initialised from a seeded
/// k-means run.
GmmFit gmm_diag(const FeatureMatrix& x, int k, std::uint64_t seed, const GmmOptions& opts = {});

}  // namespace bmaclust
