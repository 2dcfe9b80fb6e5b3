#pragma once

#include "bmaclust/types.hpp"

#include <span>
#include <string>

namespace bmaclust {

inline constexpr double kRowSumTolerance = 1e-6;
// Rows closer to 1 than this are kept as given.
inline constexpr double kRenormaliseThreshold = 1e-12;
inline constexpr double kNegativeTolerance = 1e-12;

/// Checks an N x K probability matrix and renormalises rows whose sums are
/// within kRowSumTolerance of 1. Throws BmaError on NaN/Inf, negative
/// entries or row sums outside the tolerance band.
AllocationMatrix validate_allocation(const Matrix& raw, std::string model_id);

/// One-hot allocation from 1-based labels. Distinct labels are compacted to
/// 1..K in increasing order, so gaps in the label set do not create empty
/// columns.
AllocationMatrix allocation_from_labels(std::span<const int> labels, std::string model_id);

/// Crisp projection: argmax per row, 1-based, ties to the lowest column.
Labels harden(const AllocationMatrix& a);
Labels harden(const Matrix& probs);

/// s_ij = sum_k p_ik p_jk off the diagonal, 1 on the diagonal.
SimilarityMatrix similarity_from_allocation(const AllocationMatrix& a);

/// Element-wise weighted average of the similarity matrices.
ConsensusMatrix consensus(std::span<const SimilarityMatrix> sims, const ModelWeights& w);

}  // namespace bmaclust
