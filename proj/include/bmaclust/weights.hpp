#pragma once

#include "bmaclust/clusterers.hpp"
#include "bmaclust/types.hpp"

#include <span>

namespace bmaclust {

// CH infinity sentinels and vanishing XB values are clamped before ratios
// are formed, so a "perfect" model gets a dominant but finite share.
inline constexpr double kChClamp = 1e12;
inline constexpr double kXbFloor = 1e-12;

/// Approximate posterior model probabilities from the Calinski-Harabasz and
/// Xie-Beni indices of each model's crisp projection, with a uniform prior.
///
/// Standard: W_m = CH_m / sum CH + XB_m^-1 / sum XB^-1 (higher CH and lower
/// XB are better). Literal: W_m = CH_m^-1 / sum CH^-1 + XB_m / sum XB.
/// Either way each term sums to one across models, so sum W = 2 and the
/// normalised weight is W_m / sum W.
ModelWeights chxb_weights(const FeatureMatrix& x, std::span<const AllocationMatrix> models,
                          WeightMode mode = WeightMode::Standard);

/// Same weighting from precomputed index values (already clamped or not).
ModelWeights chxb_weights_from_indices(std::span<const std::string> model_ids,
                                       std::span<const double> ch, std::span<const double> xb,
                                       WeightMode mode);

/// exp(BIC_m / 2) normalised over models, with BIC_m = 2 log L - kappa log N.
ModelWeights bic_weights(std::span<const GmmFit> fits, std::span<const std::string> model_ids = {});

/// Softmax of half the BIC values with a max shift.
std::vector<double> bic_softmax(std::span<const double> bic);

/// posterior_m = W_m prior_m / sum_m' W_m' prior_m'.
ModelWeights apply_prior(const ModelWeights& w, std::span<const double> prior);

}  // namespace bmaclust
