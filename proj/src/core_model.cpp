#include "bmaclust/core_model.hpp"

#include "bmaclust/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace bmaclust {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::RowSumViolation: return "RowSumViolation";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::WeightCountMismatch: return "WeightCountMismatch";
    case ErrorCode::TooFewClusters: return "TooFewClusters";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::CoincidentCentroids: return "CoincidentCentroids";
    case ErrorCode::NoModels: return "NoModels";
    case ErrorCode::MixedSampleSizes: return "MixedSampleSizes";
    case ErrorCode::DegeneratePrior: return "DegeneratePrior";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::InfeasibleGeometry: return "InfeasibleGeometry";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

BmaError::BmaError(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

std::string_view to_string(WeightMode mode) {
  switch (mode) {
    case WeightMode::Standard: return "standard";
    case WeightMode::Literal: return "literal";
    case WeightMode::Bic: return "bic";
  }
  return "standard";
}

WeightMode parse_weight_mode(std::string_view text) {
  if (text == "standard") return WeightMode::Standard;
  if (text == "literal") return WeightMode::Literal;
  if (text == "bic") return WeightMode::Bic;
  throw BmaError(ErrorCode::InvalidArgument,
                 "unknown weighting mode '" + std::string(text) + "' (standard|literal|bic)");
}

FeatureMatrix::FeatureMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 2 || values_.cols() < 1) {
    throw BmaError(ErrorCode::InvalidInput, "feature matrix needs at least 2 rows and 1 column, got " +
                                                std::to_string(values_.rows()) + "x" +
                                                std::to_string(values_.cols()));
  }
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      if (!std::isfinite(values_(i, j))) {
        throw BmaError(ErrorCode::NonFiniteEntry, "feature matrix row " + std::to_string(i + 1) +
                                                      ", column " + std::to_string(j + 1));
      }
    }
  }
}

AllocationMatrix validate_allocation(const Matrix& raw, std::string model_id) {
  if (raw.rows() < 2 || raw.cols() < 1) {
    throw BmaError(ErrorCode::InvalidInput, "allocation '" + model_id +
                                                "' needs at least 2 rows and 1 column");
  }
  Matrix probs = raw;
  bool hard = true;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    const std::string where = "allocation '" + model_id + "' row " + std::to_string(i + 1);
    double sum = 0.0;
    for (Eigen::Index k = 0; k < probs.cols(); ++k) {
      const double v = probs(i, k);
      if (!std::isfinite(v)) throw BmaError(ErrorCode::NonFiniteEntry, where);
      if (v < -kNegativeTolerance) {
        throw BmaError(ErrorCode::NegativeProbability, where + ": entry " + std::to_string(v));
      }
      if (v < 0.0) probs(i, k) = 0.0;
    }
    std::vector<double> sorted(probs.row(i).begin(), probs.row(i).end());
    std::sort(sorted.begin(), sorted.end());
    for (double v : sorted) sum += v;
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw BmaError(ErrorCode::RowSumViolation, where + ": row sum " + std::to_string(sum));
    }
    if (std::abs(sum - 1.0) > kRenormaliseThreshold) probs.row(i) /= sum;

    int ones = 0;
    int zeros = 0;
    for (Eigen::Index k = 0; k < probs.cols(); ++k) {
      if (probs(i, k) == 1.0) ++ones;
      else if (probs(i, k) == 0.0) ++zeros;
    }
    if (ones != 1 || ones + zeros != probs.cols()) hard = false;
  }
  return AllocationMatrix(std::move(probs), std::move(model_id), hard);
}

AllocationMatrix allocation_from_labels(std::span<const int> labels, std::string model_id) {
  std::map<int, int> compact;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1) {
      throw BmaError(ErrorCode::InvalidLabel, "allocation '" + model_id + "' row " +
                                                  std::to_string(i + 1) + ": label " +
                                                  std::to_string(labels[i]) + " is not >= 1");
    }
    compact.emplace(labels[i], 0);
  }
  int next = 0;
  for (auto& [label, column] : compact) column = next++;

  Matrix probs = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), std::max(next, 1));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    probs(static_cast<Eigen::Index>(i), compact.at(labels[i])) = 1.0;
  }
  return validate_allocation(probs, std::move(model_id));
}

Labels harden(const Matrix& probs) {
  Labels out(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < probs.cols(); ++k) {
      if (probs(i, k) > probs(i, best)) best = k;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best) + 1;
  }
  return out;
}

Labels harden(const AllocationMatrix& a) { return harden(a.probs()); }

SimilarityMatrix similarity_from_allocation(const AllocationMatrix& a) {
  SimilarityMatrix s;
  s.model_id = a.model_id();
  kernels::parallel::co_assignment(a.probs(), s.values);
  return s;
}

ConsensusMatrix consensus(std::span<const SimilarityMatrix> sims, const ModelWeights& w) {
  if (sims.empty()) throw BmaError(ErrorCode::NoModels, "consensus of zero similarity matrices");
  if (sims.size() != w.weights.size()) {
    throw BmaError(ErrorCode::WeightCountMismatch,
                   std::to_string(sims.size()) + " similarity matrices but " +
                       std::to_string(w.weights.size()) + " weights");
  }
  double total = 0.0;
  for (double v : w.weights) {
    if (!(v >= 0.0)) throw BmaError(ErrorCode::InvalidArgument, "negative or NaN model weight");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw BmaError(ErrorCode::InvalidArgument, "model weights sum to " + std::to_string(total));
  }

  const Eigen::Index n = sims.front().values.rows();
  std::vector<const Matrix*> mats;
  mats.reserve(sims.size());
  for (const auto& s : sims) {
    if (s.values.rows() != n || s.values.cols() != n) {
      throw BmaError(ErrorCode::DimensionMismatch, "similarity matrix '" + s.model_id + "' is " +
                                                       std::to_string(s.values.rows()) + "x" +
                                                       std::to_string(s.values.cols()) +
                                                       ", expected " + std::to_string(n));
    }
    mats.push_back(&s.values);
  }

  ConsensusMatrix c;
  kernels::parallel::weighted_average(mats, w.weights, c.values);
  c.contributing_models.reserve(sims.size());
  for (std::size_t m = 0; m < sims.size(); ++m) {
    const std::string& id = m < w.model_ids.size() ? w.model_ids[m] : sims[m].model_id;
    c.contributing_models.push_back({id, w.weights[m]});
  }
  return c;
}

}  // namespace bmaclust
