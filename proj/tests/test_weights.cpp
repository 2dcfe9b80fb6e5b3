#include "bmaclust/core_model.hpp"
#include "bmaclust/weights.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace bmaclust;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const BmaError& e) {
    return e.code();
  }
  FAIL("expected BmaError");
  return ErrorCode::Io;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

GmmFit fake_fit(double loglik, int kappa, Eigen::Index n) {
  GmmFit f;
  f.loglik = loglik;
  f.kappa = kappa;
  f.n = n;
  f.bic = bic_score(loglik, kappa, n);
  return f;
}

}  // namespace

TEST_SUITE("weights") {

TEST_CASE("identical models share equally") {
  const FeatureMatrix x(testsupport::column({0, 1, 10, 11, 20, 21}));
  const std::vector<int> labels{1, 1, 2, 2, 3, 3};
  std::vector<AllocationMatrix> models;
  for (int m = 0; m < 3; ++m) models.push_back(allocation_from_labels(labels, "m" + std::to_string(m)));
  for (const WeightMode mode : {WeightMode::Standard, WeightMode::Literal}) {
    const ModelWeights w = chxb_weights(x, models, mode);
    for (double v : w.weights) CHECK(v == 1.0 / 3.0);
    CHECK(w.model_ids == std::vector<std::string>{"m0", "m1", "m2"});
    CHECK(w.mode == mode);
  }
}

TEST_CASE("hand-computed standard weights") {
  const std::vector<std::string> ids{"a", "b"};
  const std::vector<double> ch{100, 300};
  const std::vector<double> xb{0.01, 0.02};
  const ModelWeights w = chxb_weights_from_indices(ids, ch, xb, WeightMode::Standard);
  // CH shares (1/4, 3/4), inverse-XB shares (2/3, 1/3), halved.
  CHECK(w.weights[0] == doctest::Approx((0.25 + 2.0 / 3.0) / 2.0).epsilon(1e-14));
  CHECK(w.weights[1] == doctest::Approx((0.75 + 1.0 / 3.0) / 2.0).epsilon(1e-14));
  CHECK(w.weights[0] == doctest::Approx(0.4583).epsilon(1e-4));
  CHECK(sum(w.raw) == doctest::Approx(2.0).epsilon(1e-15));

  const ModelWeights lit = chxb_weights_from_indices(ids, ch, xb, WeightMode::Literal);
  // Inverse-CH shares (3/4, 1/4), XB shares (1/3, 2/3).
  CHECK(lit.weights[0] == doctest::Approx((0.75 + 1.0 / 3.0) / 2.0).epsilon(1e-14));
}

TEST_CASE("equal indices give equal weights") {
  const std::vector<std::string> ids{"a", "b"};
  const std::vector<double> ch{42, 42};
  const std::vector<double> xb{0.3, 0.3};
  const ModelWeights w = chxb_weights_from_indices(ids, ch, xb, WeightMode::Standard);
  CHECK(w.weights == std::vector<double>{0.5, 0.5});
}

TEST_CASE("degenerate indices are clamped") {
  const std::vector<std::string> ids{"perfect", "ok"};
  const std::vector<double> ch{std::numeric_limits<double>::infinity(), 10.0};
  const std::vector<double> xb{0.0, 0.1};
  const ModelWeights w = chxb_weights_from_indices(ids, ch, xb, WeightMode::Standard);
  CHECK(std::isfinite(w.weights[0]));
  CHECK(w.weights[0] > 0.99);
  CHECK(w.weights[1] > 0.0);
  CHECK(sum(w.weights) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("raw sums to two and weights to one on random inputs") {
  Rng rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + static_cast<std::size_t>(uniform01(rng) * 6);
    std::vector<std::string> ids(m);
    std::vector<double> ch(m), xb(m);
    for (std::size_t i = 0; i < m; ++i) {
      ch[i] = std::exp(uniform01(rng) * 12.0);
      xb[i] = std::exp(-uniform01(rng) * 12.0);
    }
    for (const WeightMode mode : {WeightMode::Standard, WeightMode::Literal}) {
      const ModelWeights w = chxb_weights_from_indices(ids, ch, xb, mode);
      CHECK(std::abs(sum(w.raw) - 2.0) <= 1e-12);
      CHECK(std::abs(sum(w.weights) - 1.0) <= 1e-12);
      for (double v : w.weights) CHECK(v >= 0.0);
    }
  }
}

TEST_CASE("chxb weights ignore uniform feature scaling") {
  Rng rng(2);
  const Matrix base = testsupport::random_features(rng, 30, 2);
  std::vector<AllocationMatrix> models;
  for (int k = 2; k <= 4; ++k) {
    models.push_back(allocation_from_labels(testsupport::random_labels(rng, 30, k), "k" + std::to_string(k)));
  }
  const ModelWeights a = chxb_weights(FeatureMatrix(base), models);
  const ModelWeights b = chxb_weights(FeatureMatrix(base * 1e3), models);
  for (std::size_t m = 0; m < 3; ++m) CHECK(std::abs(a.weights[m] - b.weights[m]) <= 1e-9);
}

TEST_CASE("soft models are scored on their crisp projection") {
  const FeatureMatrix x(testsupport::column({0, 1, 10, 11}));
  Matrix soft(4, 2);
  soft << 0.9, 0.1, 0.6, 0.4, 0.2, 0.8, 0.3, 0.7;
  const std::vector<AllocationMatrix> models{validate_allocation(soft, "soft")};
  const ModelWeights w = chxb_weights(x, models);
  CHECK(w.ch[0] == doctest::Approx(200.0));
  CHECK(w.xb[0] == doctest::Approx(0.0025));
}

TEST_CASE("index errors are tagged with the model id") {
  const FeatureMatrix x(testsupport::column({0, 1, 2, 3}));
  const std::vector<int> one{1, 1, 1, 1};
  const std::vector<AllocationMatrix> models{allocation_from_labels(one, "flat")};
  try {
    chxb_weights(x, models);
    FAIL("no throw");
  } catch (const BmaError& e) {
    CHECK(e.code() == ErrorCode::TooFewClusters);
    CHECK(std::string(e.what()).find("flat") != std::string::npos);
  }
  CHECK(code_of([&] { chxb_weights(x, std::span<const AllocationMatrix>{}); }) == ErrorCode::NoModels);
}

TEST_CASE("bic weights") {
  const std::vector<double> equal = bic_softmax(std::vector<double>{-10.0, -10.0});
  CHECK(equal == std::vector<double>{0.5, 0.5});

  const std::vector<double> nine = bic_softmax(std::vector<double>{2.0 * std::log(9.0), 0.0});
  CHECK(std::abs(nine[0] - 0.9) <= 1e-9);
  CHECK(std::abs(nine[1] - 0.1) <= 1e-9);

  const std::vector<double> far = bic_softmax(std::vector<double>{0.0, -2000.0});
  CHECK(far[0] == 1.0);
  CHECK(far[1] >= 0.0);
  CHECK(far[1] < 1e-300);

  const std::vector<GmmFit> fits{fake_fit(-120.0, 5, 100), fake_fit(-110.0, 11, 100), fake_fit(-108.0, 17, 100)};
  const std::vector<std::string> ids{"g1", "g2", "g3"};
  const ModelWeights w = bic_weights(fits, ids);
  std::vector<double> bic;
  for (const auto& f : fits) bic.push_back(2.0 * f.loglik - f.kappa * std::log(100.0));
  const auto ref = oracle::bic_posterior(bic);
  for (std::size_t m = 0; m < 3; ++m) CHECK(std::abs(w.weights[m] - ref[m]) <= 1e-9);
  CHECK(w.mode == WeightMode::Bic);
  CHECK(w.bic == bic);

  const std::vector<GmmFit> mixed{fake_fit(-1, 5, 100), fake_fit(-1, 5, 101)};
  CHECK(code_of([&] { bic_weights(mixed); }) == ErrorCode::MixedSampleSizes);
}

TEST_CASE("bic softmax ignores a common shift") {
  const std::vector<double> a = bic_softmax(std::vector<double>{-3.0, 1.5, 0.25});
  const std::vector<double> b = bic_softmax(std::vector<double>{-1003.0, -998.5, -999.75});
  for (std::size_t m = 0; m < 3; ++m) CHECK(std::abs(a[m] - b[m]) <= 1e-12);
}

TEST_CASE("apply_prior") {
  ModelWeights w;
  w.weights = {0.4, 0.6};
  w.prior = {0.5, 0.5};
  w.raw = {0.8, 1.2};

  const ModelWeights uniform = apply_prior(w, std::vector<double>{0.5, 0.5});
  for (std::size_t m = 0; m < 2; ++m) CHECK(std::abs(uniform.weights[m] - w.weights[m]) <= 1e-12);

  CHECK(apply_prior(w, std::vector<double>{1.0, 0.0}).weights == std::vector<double>{1.0, 0.0});

  const ModelWeights tilted = apply_prior(w, std::vector<double>{0.75, 0.25});
  CHECK(tilted.weights[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(tilted.weights[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(tilted.prior == std::vector<double>{0.75, 0.25});

  ModelWeights lopsided = w;
  lopsided.weights = {1.0, 0.0};
  CHECK(code_of([&] { apply_prior(lopsided, std::vector<double>{0.0, 1.0}); }) == ErrorCode::DegeneratePrior);
  CHECK(code_of([&] { apply_prior(w, std::vector<double>{1.0}); }) == ErrorCode::WeightCountMismatch);
  CHECK(code_of([&] { apply_prior(w, std::vector<double>{0.7, 0.7}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { apply_prior(w, std::vector<double>{1.5, -0.5}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("weight mode names round-trip") {
  for (const WeightMode mode : {WeightMode::Standard, WeightMode::Literal, WeightMode::Bic}) {
    CHECK(parse_weight_mode(to_string(mode)) == mode);
  }
  CHECK(code_of([] { parse_weight_mode("median"); }) == ErrorCode::InvalidArgument);
}

}  // TEST_SUITE
