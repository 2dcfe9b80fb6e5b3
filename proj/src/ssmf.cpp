#include "bmaclust/ssmf.hpp"

#include "bmaclust/kernels.hpp"
#include "bmaclust/random.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace bmaclust {
namespace {

constexpr int kMaxHalvings = 60;

using GramFn = void (*)(const Matrix&, const Matrix&, Matrix&);

void project_row(double* row, Eigen::Index k, std::vector<double>& sorted) {
  sorted.assign(row, row + k);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    cumulative += sorted[static_cast<std::size_t>(j)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (sorted[static_cast<std::size_t>(j)] - candidate > 0.0) theta = candidate;
  }
  for (Eigen::Index j = 0; j < k; ++j) row[j] = std::max(row[j] - theta, 0.0);
}

// J from a precomputed C*A: ||C||^2 - 2<A, CA> + ||A^T A||^2 - lambda ||A||^2.
double objective(double c_norm2, const Matrix& a, const Matrix& ca, double lambda) {
  const Matrix ata = a.transpose() * a;
  return c_norm2 - 2.0 * a.cwiseProduct(ca).sum() + ata.squaredNorm() - lambda * a.squaredNorm();
}

struct RestartResult {
  Matrix a;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

RestartResult run_restart(const Matrix& c, double c_norm2, int k, const SsmfOptions& opts,
                          int restart, GramFn gram) {
  const Eigen::Index n = c.rows();
  Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(restart)));

  RestartResult out;
  out.a.resize(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      out.a(i, j) = 1.0 / k + opts.init_noise * (2.0 * uniform01(rng) - 1.0);
    }
  }
  project_rows_simplex(out.a);

  Matrix ca;
  gram(c, out.a, ca);
  double current = objective(c_norm2, out.a, ca, opts.lambda);
  out.trace.push_back(current);

  double step = 1.0 / static_cast<double>(n);
  const double max_step = 1.0;
  Matrix grad(n, k);
  Matrix trial(n, k);
  Matrix trial_ca;
  for (int it = 0; it < opts.max_iter; ++it) {
    grad = -4.0 * (ca - out.a * (out.a.transpose() * out.a)) - 2.0 * opts.lambda * out.a;

    step = std::min(2.0 * step, max_step);
    bool accepted = false;
    double next = current;
    for (int h = 0; h < kMaxHalvings; ++h) {
      trial = out.a - step * grad;
      project_rows_simplex(trial);
      gram(c, trial, trial_ca);
      next = objective(c_norm2, trial, trial_ca, opts.lambda);
      if (next < current) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    out.iterations = it + 1;
    if (!accepted) {
      // No descent direction left at machine precision.
      out.converged = true;
      break;
    }
    const double rel = (current - next) / std::max(std::abs(current), 1.0);
    out.a.swap(trial);
    ca.swap(trial_ca);
    current = next;
    out.trace.push_back(current);
    if (rel < opts.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace

std::vector<double> project_row_simplex(std::span<const double> v) {
  std::vector<double> row(v.begin(), v.end());
  if (row.empty()) return row;
  std::vector<double> scratch;
  project_row(row.data(), static_cast<Eigen::Index>(row.size()), scratch);
  return row;
}

void project_rows_simplex(Matrix& a) {
  std::vector<double> scratch;
  for (Eigen::Index i = 0; i < a.rows(); ++i) project_row(a.row(i).data(), a.cols(), scratch);
}

double ssmf_objective(const Matrix& c, const Matrix& a, double lambda) {
  return (c - a * a.transpose()).squaredNorm() - lambda * a.squaredNorm();
}

BmaResult factorize(const Matrix& c, int k_bma, const SsmfOptions& opts) {
  const Eigen::Index n = c.rows();
  if (c.cols() != n || n < 1) {
    throw BmaError(ErrorCode::DimensionMismatch, "factorize needs a square, non-empty matrix");
  }
  if (k_bma < 1 || k_bma > n) {
    throw BmaError(ErrorCode::InvalidK, "k_bma=" + std::to_string(k_bma) + " outside [1, " +
                                            std::to_string(n) + "]");
  }
  if (!(opts.lambda >= 0.0) || !std::isfinite(opts.lambda)) {
    throw BmaError(ErrorCode::InvalidArgument, "lambda must be finite and >= 0");
  }
  if (opts.restarts < 1 || opts.max_iter < 1) {
    throw BmaError(ErrorCode::InvalidArgument, "restarts and max_iter must be >= 1");
  }

  const double c_norm2 = c.squaredNorm();
  std::vector<RestartResult> runs(static_cast<std::size_t>(opts.restarts));
  // Parallelise across restarts when there are several, otherwise inside the
  // product; both kernels give identical bits.
  if (opts.restarts > 1 && omp_get_max_threads() > 1) {
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < opts.restarts; ++r) {
      runs[static_cast<std::size_t>(r)] =
          run_restart(c, c_norm2, k_bma, opts, r, &kernels::serial::gram_product);
    }
  } else {
    for (int r = 0; r < opts.restarts; ++r) {
      runs[static_cast<std::size_t>(r)] =
          run_restart(c, c_norm2, k_bma, opts, r, &kernels::parallel::gram_product);
    }
  }

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].trace.back() < runs[best].trace.back()) best = r;
  }

  BmaResult result;
  RestartResult& win = runs[best];
  result.allocation = std::move(win.a);
  result.objective_trace = std::move(win.trace);
  result.iterations = win.iterations;
  result.converged = win.converged;
  result.k_bma = k_bma;
  result.seed = opts.seed;
  result.lambda = opts.lambda;
  result.restarts = opts.restarts;
  result.best_restart = static_cast<int>(best);
  const double mass_floor = opts.empty_threshold * static_cast<double>(n);
  for (int j = 0; j < k_bma; ++j) {
    if (result.allocation.col(j).sum() < mass_floor) result.emptied.push_back(j);
  }
  result.uncertainty = allocation_uncertainty(result.allocation);
  return result;
}

BmaResult factorize(const ConsensusMatrix& c, int k_bma, const SsmfOptions& opts) {
  return factorize(c.values, k_bma, opts);
}

std::vector<double> allocation_uncertainty(const Matrix& a) {
  std::vector<double> u(static_cast<std::size_t>(a.rows()));
  const double cap = a.cols() > 0 ? 1.0 - 1.0 / static_cast<double>(a.cols()) : 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    u[static_cast<std::size_t>(i)] = std::clamp(1.0 - a.row(i).maxCoeff(), 0.0, cap);
  }
  return u;
}

int suggest_k_bma(std::span<const AllocationMatrix> models) {
  if (models.empty()) throw BmaError(ErrorCode::NoModels, "suggest_k_bma needs at least one model");
  int k = 0;
  for (const auto& m : models) k = std::max(k, m.k());
  return k;
}

}  // namespace bmaclust
