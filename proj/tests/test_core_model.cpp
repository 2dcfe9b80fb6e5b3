#include "bmaclust/core_model.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace bmaclust;
using testsupport::rows_of;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const BmaError& e) {
    return e.code();
  }
  FAIL("expected BmaError");
  return ErrorCode::Io;
}

ModelWeights weights_of(std::vector<double> w) {
  ModelWeights out;
  out.weights = std::move(w);
  out.prior.assign(out.weights.size(), 1.0 / static_cast<double>(out.weights.size()));
  return out;
}

}  // namespace

TEST_SUITE("core_model") {

TEST_CASE("validate_allocation accepts hard and soft rows") {
  const auto hard = validate_allocation(mat({{1, 0}, {0, 1}}), "h");
  CHECK(hard.hard());
  CHECK(hard.k() == 2);
  CHECK(hard.model_id() == "h");

  const auto soft = validate_allocation(mat({{0.5, 0.5}, {0.3, 0.7}}), "s");
  CHECK_FALSE(soft.hard());
}

TEST_CASE("validate_allocation rejects bad rows") {
  CHECK(code_of([] { validate_allocation(mat({{0.5, 0.4}, {0.3, 0.7}}), "x"); }) ==
        ErrorCode::RowSumViolation);
  CHECK(code_of([] { validate_allocation(mat({{1.1, -0.1}, {0.3, 0.7}}), "x"); }) ==
        ErrorCode::NegativeProbability);
  CHECK(code_of([] { validate_allocation(mat({{std::nan(""), 1}, {0.3, 0.7}}), "x"); }) ==
        ErrorCode::NonFiniteEntry);
  CHECK(code_of([] { validate_allocation(mat({{1, 0}}), "x"); }) == ErrorCode::InvalidInput);
}

TEST_CASE("rows within tolerance are renormalised") {
  const auto a = validate_allocation(mat({{0.5, 0.5 + 5e-7}, {1, 0}}), "x");
  CHECK(a.probs().row(0).sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a.probs()(0, 0) < 0.5);
}

TEST_CASE("allocation_from_labels compacts labels") {
  const std::vector<int> labels{3, 3, 7, 1};
  const auto a = allocation_from_labels(labels, "l");
  CHECK(a.k() == 3);
  CHECK(a.hard());
  CHECK(harden(a) == Labels{2, 2, 3, 1});
  CHECK(code_of([] {
          const std::vector<int> bad{1, 0};
          allocation_from_labels(bad, "l");
        }) == ErrorCode::InvalidLabel);
}

TEST_CASE("harden takes argmax with ties to the lowest column") {
  CHECK(harden(validate_allocation(mat({{1, 0}, {0, 1}}), "a")) == Labels{1, 2});
  CHECK(harden(validate_allocation(mat({{0.6, 0.4}, {0.2, 0.8}}), "a")) == Labels{1, 2});
  CHECK(harden(mat({{0.5, 0.5}})) == Labels{1});
}

TEST_CASE("similarity examples") {
  const std::vector<int> labels{1, 1, 2};
  const auto s = similarity_from_allocation(allocation_from_labels(labels, "h"));
  CHECK(s.values == mat({{1, 1, 0}, {1, 1, 0}, {0, 0, 1}}));
  CHECK(s.model_id == "h");

  const auto half = similarity_from_allocation(validate_allocation(mat({{0.5, 0.5}, {0.5, 0.5}}), "s"));
  CHECK(half.values(0, 1) == 0.5);
  CHECK(half.values(0, 0) == 1.0);

  const auto mixed = similarity_from_allocation(validate_allocation(mat({{1, 0}, {0.2, 0.8}}), "s"));
  CHECK(mixed.values(0, 1) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("similarity matches the brute-force double loop") {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(uniform01(rng) * 19);
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(uniform01(rng) * 5);
    const auto a = validate_allocation(testsupport::random_allocation(rng, n, k), "r");
    const auto s = similarity_from_allocation(a);
    const auto ref = oracle::similarity(rows_of(a.probs()));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        CHECK(std::abs(s.values(i, j) - ref[i][j]) <= 1e-12);
        CHECK(s.values(i, j) == s.values(j, i));
      }
    }
  }
}

TEST_CASE("similarity is bit-identical under column permutation") {
  Rng rng(5);
  const Matrix p = testsupport::random_allocation(rng, 25, 4);
  std::vector<int> perm{2, 0, 3, 1};
  Matrix q(p.rows(), p.cols());
  for (int j = 0; j < 4; ++j) q.col(j) = p.col(perm[j]);
  const auto s1 = similarity_from_allocation(validate_allocation(p, "p"));
  const auto s2 = similarity_from_allocation(validate_allocation(q, "q"));
  CHECK(s1.values == s2.values);
}

TEST_CASE("consensus examples") {
  const std::vector<int> l1{1, 1, 2};
  const std::vector<int> l2{1, 2, 2};
  const auto s1 = similarity_from_allocation(allocation_from_labels(l1, "a"));
  const auto s2 = similarity_from_allocation(allocation_from_labels(l2, "b"));

  const std::vector<SimilarityMatrix> one{s1};
  CHECK(consensus(one, weights_of({1.0})).values == s1.values);

  const std::vector<SimilarityMatrix> two{s1, s2};
  const auto c = consensus(two, weights_of({0.5, 0.5}));
  CHECK(c.values(0, 1) == 0.5);
  CHECK(c.values(1, 2) == 0.5);
  CHECK(c.values(0, 2) == 0.0);
  CHECK(c.contributing_models.size() == 2);

  SimilarityMatrix mid{Matrix::Constant(3, 3, 0.5), "m"};
  mid.values.diagonal().setOnes();
  SimilarityMatrix zero{Matrix::Identity(3, 3), "z"};
  SimilarityMatrix ones{Matrix::Ones(3, 3), "o"};
  const std::vector<SimilarityMatrix> three{zero, mid, ones};
  const auto c3 = consensus(three, weights_of({1.0 / 3, 1.0 / 3, 1.0 / 3}));
  CHECK(c3.values(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("consensus errors") {
  const std::vector<int> l3{1, 1, 2};
  const std::vector<int> l4{1, 1, 2, 2};
  const auto s3 = similarity_from_allocation(allocation_from_labels(l3, "a"));
  const auto s4 = similarity_from_allocation(allocation_from_labels(l4, "b"));
  const std::vector<SimilarityMatrix> mixed{s3, s4};
  CHECK(code_of([&] { consensus(mixed, weights_of({0.5, 0.5})); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { consensus(mixed, weights_of({1.0})); }) == ErrorCode::WeightCountMismatch);
  const std::vector<SimilarityMatrix> none;
  CHECK(code_of([&] { consensus(none, weights_of({})); }) == ErrorCode::NoModels);
  const std::vector<SimilarityMatrix> same{s3, s3};
  CHECK(code_of([&] { consensus(same, weights_of({0.7, 0.7})); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("consensus is convex and idempotent") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<SimilarityMatrix> sims;
    for (int m = 0; m < 3; ++m) {
      sims.push_back(similarity_from_allocation(
          validate_allocation(testsupport::random_allocation(rng, 15, 2 + m), "m")));
    }
    const double a = uniform01(rng);
    const double b = (1.0 - a) * uniform01(rng);
    const auto c = consensus(sims, weights_of({a, b, 1.0 - a - b}));
    for (Eigen::Index i = 0; i < 15; ++i) {
      for (Eigen::Index j = 0; j < 15; ++j) {
        const double lo = std::min({sims[0].values(i, j), sims[1].values(i, j), sims[2].values(i, j)});
        const double hi = std::max({sims[0].values(i, j), sims[1].values(i, j), sims[2].values(i, j)});
        CHECK(c.values(i, j) >= lo - 1e-15);
        CHECK(c.values(i, j) <= hi + 1e-15);
      }
    }
    const std::vector<SimilarityMatrix> copies{sims[0], sims[0], sims[0]};
    const auto same = consensus(copies, weights_of({a, b, 1.0 - a - b}));
    CHECK((same.values - sims[0].values).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("error messages carry the code name") {
  try {
    validate_allocation(mat({{0.5, 0.4}, {0.3, 0.7}}), "bad");
    FAIL("no throw");
  } catch (const BmaError& e) {
    CHECK(std::string(e.what()).find("RowSumViolation") != std::string::npos);
  }
}

}  // TEST_SUITE
