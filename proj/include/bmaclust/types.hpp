#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bmaclust {

// Row-major so that per-observation kernels walk contiguous memory.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// 1-based cluster labels, one per observation.
using Labels = std::vector<int>;

enum class ErrorCode {
  InvalidArgument,
  InvalidInput,
  NonFiniteEntry,
  NegativeProbability,
  RowSumViolation,
  InvalidLabel,
  DimensionMismatch,
  WeightCountMismatch,
  TooFewClusters,
  TooFewPoints,
  CoincidentCentroids,
  NoModels,
  MixedSampleSizes,
  DegeneratePrior,
  InvalidK,
  KTooLarge,
  DegenerateData,
  InfeasibleGeometry,
  Io,
};

std::string_view to_string(ErrorCode code);

class BmaError : public std::runtime_error {
 public:
  BmaError(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// N observations by D features, all finite, N >= 2 and D >= 1.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  Eigen::Index n() const noexcept { return values_.rows(); }
  Eigen::Index d() const noexcept { return values_.cols(); }

 private:
  Matrix values_;
};

/// Row-stochastic N x K allocation for one model. Construct through
/// validate_allocation() or allocation_from_labels().
class AllocationMatrix {
 public:
  const Matrix& probs() const noexcept { return probs_; }
  const std::string& model_id() const noexcept { return model_id_; }
  Eigen::Index n() const noexcept { return probs_.rows(); }
  int k() const noexcept { return static_cast<int>(probs_.cols()); }
  bool hard() const noexcept { return hard_; }

 private:
  friend AllocationMatrix validate_allocation(const Matrix&, std::string);
  AllocationMatrix(Matrix probs, std::string model_id, bool hard)
      : probs_(std::move(probs)), model_id_(std::move(model_id)), hard_(hard) {}

  Matrix probs_;
  std::string model_id_;
  bool hard_ = false;
};

struct SimilarityMatrix {
  Matrix values;
  std::string model_id;
};

struct ModelContribution {
  std::string model_id;
  double weight = 0.0;
};

struct ConsensusMatrix {
  Matrix values;
  std::vector<ModelContribution> contributing_models;
};

enum class WeightMode { Standard, Literal, Bic };

std::string_view to_string(WeightMode mode);
WeightMode parse_weight_mode(std::string_view text);

struct ModelWeights {
  std::vector<std::string> model_ids;
  std::vector<double> weights;  // normalised posterior approximation, sums to 1
  std::vector<double> prior;    // p(M_m), sums to 1
  std::vector<double> raw;      // pre-normalisation scores
  WeightMode mode = WeightMode::Standard;

  // Per-model index values behind the weights; empty entries for modes that
  // do not use them.
  std::vector<double> ch;
  std::vector<double> xb;
  std::vector<double> bic;

  std::size_t size() const noexcept { return weights.size(); }
};

struct BmaResult {
  Matrix allocation;                   // N x K_BMA, rows on the simplex
  std::vector<double> uncertainty;     // p(g_i != modal cluster)
  int k_bma = 0;
  std::vector<int> emptied;            // 0-based columns with negligible mass
  std::vector<double> objective_trace; // non-increasing
  std::uint64_t seed = 0;
  double lambda = 0.0;
  int restarts = 0;
  int best_restart = 0;
  int iterations = 0;
  bool converged = false;
};

}  // namespace bmaclust
