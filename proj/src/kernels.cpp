#include "bmaclust/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

namespace bmaclust::kernels {
namespace {

void check_square_output(const Matrix& src, Matrix& out) {
  if (out.rows() != src.rows() || out.cols() != src.rows()) {
    out.resize(src.rows(), src.rows());
  }
}

// Row i of the co-assignment matrix. `buf` holds K scratch doubles.
void co_assignment_row(const Matrix& probs, Eigen::Index i, Matrix& out,
                       std::vector<double>& buf) {
  const Eigen::Index n = probs.rows();
  const Eigen::Index k = probs.cols();
  const double* pi = probs.row(i).data();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == i) {
      out(i, j) = 1.0;
      continue;
    }
    const double* pj = probs.row(j).data();
    for (Eigen::Index c = 0; c < k; ++c) buf[c] = pi[c] * pj[c];
    std::sort(buf.begin(), buf.begin() + k);
    double s = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) s += buf[c];
    out(i, j) = std::min(s, 1.0);
  }
}

void weighted_average_row(std::span<const Matrix* const> mats, std::span<const double> w,
                          Eigen::Index i, Matrix& out) {
  const Eigen::Index n = out.cols();
  double* row = out.row(i).data();
  std::fill(row, row + n, 0.0);
  for (std::size_t m = 0; m < mats.size(); ++m) {
    const double* src = mats[m]->row(i).data();
    const double wm = w[m];
    for (Eigen::Index j = 0; j < n; ++j) row[j] += wm * src[j];
  }
  for (Eigen::Index j = 0; j < n; ++j) row[j] = std::clamp(row[j], 0.0, 1.0);
  row[i] = 1.0;
}

void pairwise_distances_row(const Matrix& x, Eigen::Index i, Matrix& out) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const double* xi = x.row(i).data();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double* xj = x.row(j).data();
    double s = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
      const double diff = xi[c] - xj[c];
      s += diff * diff;
    }
    out(i, j) = std::sqrt(s);
  }
}

void gram_product_row(const Matrix& c, const Matrix& a, Eigen::Index i, Matrix& out) {
  const Eigen::Index n = c.cols();
  const Eigen::Index k = a.cols();
  double* dst = out.row(i).data();
  std::fill(dst, dst + k, 0.0);
  const double* ci = c.row(i).data();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double cij = ci[j];
    const double* aj = a.row(j).data();
    for (Eigen::Index col = 0; col < k; ++col) dst[col] += cij * aj[col];
  }
}

void check_weighted_inputs(std::span<const Matrix* const> mats, std::span<const double> w,
                           Matrix& out) {
  if (mats.size() != w.size() || mats.empty()) {
    throw BmaError(ErrorCode::WeightCountMismatch, "weighted_average: matrix/weight count mismatch");
  }
  const Eigen::Index n = mats.front()->rows();
  for (const Matrix* m : mats) {
    if (m->rows() != n || m->cols() != n) {
      throw BmaError(ErrorCode::DimensionMismatch, "weighted_average: matrices differ in size");
    }
  }
  out.resize(n, n);
}

}  // namespace

namespace serial {

void co_assignment(const Matrix& probs, Matrix& out) {
  check_square_output(probs, out);
  std::vector<double> buf(static_cast<std::size_t>(probs.cols()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) co_assignment_row(probs, i, out, buf);
}

void weighted_average(std::span<const Matrix* const> mats, std::span<const double> w,
                      Matrix& out) {
  check_weighted_inputs(mats, w, out);
  for (Eigen::Index i = 0; i < out.rows(); ++i) weighted_average_row(mats, w, i, out);
}

void pairwise_distances(const Matrix& x, Matrix& out) {
  check_square_output(x, out);
  for (Eigen::Index i = 0; i < x.rows(); ++i) pairwise_distances_row(x, i, out);
}

void gram_product(const Matrix& c, const Matrix& a, Matrix& out) {
  out.resize(c.rows(), a.cols());
  for (Eigen::Index i = 0; i < c.rows(); ++i) gram_product_row(c, a, i, out);
}

}  // namespace serial

namespace parallel {

void co_assignment(const Matrix& probs, Matrix& out) {
  check_square_output(probs, out);
  const Eigen::Index n = probs.rows();
#pragma omp parallel
  {
    std::vector<double> buf(static_cast<std::size_t>(probs.cols()));
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) co_assignment_row(probs, i, out, buf);
  }
}

void weighted_average(std::span<const Matrix* const> mats, std::span<const double> w,
                      Matrix& out) {
  check_weighted_inputs(mats, w, out);
  const Eigen::Index n = out.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) weighted_average_row(mats, w, i, out);
}

void pairwise_distances(const Matrix& x, Matrix& out) {
  check_square_output(x, out);
  const Eigen::Index n = x.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) pairwise_distances_row(x, i, out);
}

void gram_product(const Matrix& c, const Matrix& a, Matrix& out) {
  out.resize(c.rows(), a.cols());
  const Eigen::Index n = c.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) gram_product_row(c, a, i, out);
}

}  // namespace parallel

int thread_cap_from_env() {
  const char* raw = std::getenv("BMA_CLUSTER_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  try {
    const int cap = std::stoi(raw);
    return cap > 0 ? cap : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

void apply_thread_cap_from_env() {
  if (const int cap = thread_cap_from_env(); cap > 0) omp_set_num_threads(cap);
}

}  // namespace bmaclust::kernels
