#include "bmaclust/weights.hpp"

#include "bmaclust/core_model.hpp"
#include "bmaclust/validity.hpp"

#include <algorithm>
#include <cmath>

namespace bmaclust {
namespace {

// v_i / sum_j v_j for non-negative v, evaluated as 1 / sum_j (v_j / v_i) so
// that equal entries map to exactly 1/M.
std::vector<double> shares(std::span<const double> v) {
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) continue;
    double ratio_sum = 0.0;
    for (double vj : v) ratio_sum += vj / v[i];
    out[i] = 1.0 / ratio_sum;
  }
  return out;
}

std::vector<double> inverses(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = 1.0 / v[i];
  return out;
}

std::vector<double> uniform(std::size_t m) {
  return std::vector<double>(m, 1.0 / static_cast<double>(m));
}

BmaError tagged(const BmaError& e, const std::string& model_id) {
  return BmaError(e.code(), "model '" + model_id + "': " + e.what());
}

}  // namespace

ModelWeights chxb_weights_from_indices(std::span<const std::string> model_ids,
                                       std::span<const double> ch, std::span<const double> xb,
                                       WeightMode mode) {
  if (ch.empty()) throw BmaError(ErrorCode::NoModels, "chxb weighting needs at least one model");
  if (ch.size() != xb.size() || (!model_ids.empty() && model_ids.size() != ch.size())) {
    throw BmaError(ErrorCode::WeightCountMismatch, "index vectors differ in length");
  }
  if (mode == WeightMode::Bic) {
    throw BmaError(ErrorCode::InvalidArgument, "chxb weighting called with mode 'bic'");
  }
  std::vector<double> ch_c(ch.size());
  std::vector<double> xb_c(xb.size());
  for (std::size_t m = 0; m < ch.size(); ++m) {
    ch_c[m] = std::min(ch[m], kChClamp);
    xb_c[m] = std::max(xb[m], kXbFloor);
  }

  const std::vector<double> ch_term = mode == WeightMode::Standard ? shares(ch_c) : shares(inverses(ch_c));
  const std::vector<double> xb_term = mode == WeightMode::Standard ? shares(inverses(xb_c)) : shares(xb_c);

  ModelWeights w;
  w.mode = mode;
  w.model_ids.assign(model_ids.begin(), model_ids.end());
  w.ch.assign(ch.begin(), ch.end());
  w.xb.assign(xb.begin(), xb.end());
  w.raw.resize(ch.size());
  for (std::size_t m = 0; m < ch.size(); ++m) w.raw[m] = ch_term[m] + xb_term[m];
  w.weights = shares(w.raw);
  w.prior = uniform(ch.size());
  return w;
}

ModelWeights chxb_weights(const FeatureMatrix& x, std::span<const AllocationMatrix> models,
                          WeightMode mode) {
  if (models.empty()) throw BmaError(ErrorCode::NoModels, "chxb weighting needs at least one model");
  const std::size_t m_count = models.size();
  std::vector<std::string> ids(m_count);
  std::vector<double> ch(m_count);
  std::vector<double> xb(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    const AllocationMatrix& a = models[m];
    ids[m] = a.model_id();
    if (a.n() != x.n()) {
      throw BmaError(ErrorCode::DimensionMismatch, "model '" + a.model_id() + "' has " +
                                                       std::to_string(a.n()) + " rows, data has " +
                                                       std::to_string(x.n()));
    }
    const Labels labels = harden(a);
    try {
      ch[m] = calinski_harabasz(x, labels);
      xb[m] = xie_beni(x, labels);
    } catch (const BmaError& e) {
      throw tagged(e, a.model_id());
    }
  }
  return chxb_weights_from_indices(ids, ch, xb, mode);
}

std::vector<double> bic_softmax(std::span<const double> bic) {
  if (bic.empty()) throw BmaError(ErrorCode::NoModels, "bic weighting needs at least one model");
  const double top = *std::max_element(bic.begin(), bic.end());
  std::vector<double> out(bic.size());
  for (std::size_t m = 0; m < bic.size(); ++m) out[m] = std::exp(0.5 * (bic[m] - top));
  return shares(out);
}

ModelWeights bic_weights(std::span<const GmmFit> fits, std::span<const std::string> model_ids) {
  if (fits.empty()) throw BmaError(ErrorCode::NoModels, "bic weighting needs at least one model");
  if (!model_ids.empty() && model_ids.size() != fits.size()) {
    throw BmaError(ErrorCode::WeightCountMismatch, "model id count differs from fit count");
  }
  const Eigen::Index n = fits.front().n;
  std::vector<double> bic(fits.size());
  for (std::size_t m = 0; m < fits.size(); ++m) {
    if (fits[m].n != n) {
      throw BmaError(ErrorCode::MixedSampleSizes, "fit " + std::to_string(m + 1) + " has N=" +
                                                      std::to_string(fits[m].n) + ", expected " +
                                                      std::to_string(n));
    }
    bic[m] = bic_score(fits[m].loglik, fits[m].kappa, n);
  }
  ModelWeights w;
  w.mode = WeightMode::Bic;
  w.model_ids.assign(model_ids.begin(), model_ids.end());
  w.bic = bic;
  w.raw = bic_softmax(bic);
  w.weights = shares(w.raw);
  w.prior = uniform(fits.size());
  return w;
}

ModelWeights apply_prior(const ModelWeights& w, std::span<const double> prior) {
  if (prior.size() != w.weights.size()) {
    throw BmaError(ErrorCode::WeightCountMismatch, "prior has " + std::to_string(prior.size()) +
                                                       " entries for " + std::to_string(w.size()) +
                                                       " models");
  }
  double total = 0.0;
  for (double p : prior) {
    if (!std::isfinite(p) || p < 0.0) {
      throw BmaError(ErrorCode::InvalidArgument, "prior entries must be finite and >= 0");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw BmaError(ErrorCode::InvalidArgument, "prior sums to " + std::to_string(total));
  }
  std::vector<double> joint(prior.size());
  double evidence = 0.0;
  for (std::size_t m = 0; m < prior.size(); ++m) {
    joint[m] = w.weights[m] * prior[m];
    evidence += joint[m];
  }
  if (!(evidence > 0.0)) {
    throw BmaError(ErrorCode::DegeneratePrior, "prior assigns zero mass to every weighted model");
  }
  ModelWeights out = w;
  out.prior.assign(prior.begin(), prior.end());
  for (std::size_t m = 0; m < prior.size(); ++m) out.weights[m] = joint[m] / evidence;
  return out;
}

}  // namespace bmaclust
