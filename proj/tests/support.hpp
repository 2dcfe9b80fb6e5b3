#pragma once

#include "bmaclust/random.hpp"
#include "bmaclust/types.hpp"
#include "oracles.hpp"

#include <filesystem>
#include <string>

namespace testsupport {

using bmaclust::Matrix;

inline oracle::Rows rows_of(const Matrix& m) {
  oracle::Rows r(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[i][j] = m(i, j);
  return r;
}

inline Matrix column(std::initializer_list<double> values) {
  Matrix m(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index i = 0;
  for (double v : values) m(i++, 0) = v;
  return m;
}

inline Matrix random_features(bmaclust::Rng& rng, Eigen::Index n, Eigen::Index d) {
  Matrix x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = bmaclust::standard_normal(rng) * 3.0;
  return x;
}

// Random rows on the simplex; a fraction of them one-hot.
inline Matrix random_allocation(bmaclust::Rng& rng, Eigen::Index n, Eigen::Index k) {
  Matrix a = Matrix::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (bmaclust::uniform01(rng) < 0.3) {
      a(i, static_cast<Eigen::Index>(bmaclust::uniform01(rng) * static_cast<double>(k))) = 1.0;
      continue;
    }
    double s = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) s += (a(i, j) = bmaclust::uniform01(rng) + 1e-3);
    a.row(i) /= s;
  }
  return a;
}

// Labels 1..k with every label used at least once (first k points cover them).
inline bmaclust::Labels random_labels(bmaclust::Rng& rng, std::size_t n, int k) {
  bmaclust::Labels l(n);
  for (std::size_t i = 0; i < n; ++i) {
    l[i] = i < static_cast<std::size_t>(k) ? static_cast<int>(i) + 1
                                           : 1 + static_cast<int>(bmaclust::uniform01(rng) * k);
  }
  return l;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("bmaclust_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testsupport
