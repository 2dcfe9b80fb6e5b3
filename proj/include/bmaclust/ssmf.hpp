#pragma once

#include "bmaclust/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace bmaclust {

struct SsmfOptions {
  double lambda = 0.01;          // weight of the -lambda ||A||_F^2 concentration term
  int restarts = 10;
  int max_iter = 1000;
  double tol = 1e-8;             // relative objective change for convergence
  std::uint64_t seed = 0;
  double empty_threshold = 1e-3; // column mass below threshold * N is reported as emptied
  double init_noise = 0.01;
};

/// Euclidean projection onto the probability simplex (sort and threshold).
std::vector<double> project_row_simplex(std::span<const double> v);

/// Projects every row of `a` onto the simplex in place.
void project_rows_simplex(Matrix& a);

/// J(A) = ||C - A A^T||_F^2 - lambda ||A||_F^2, evaluated directly.
double ssmf_objective(const Matrix& c, const Matrix& a, double lambda);

/// Symmetric simplex factorisation C ~ A A^T with rows of A on the simplex,
/// by projected gradient descent with a halving line search. Restarts are
/// independent and the lowest final objective wins (ties to the lower
/// restart index), so the result does not depend on thread scheduling.
BmaResult factorize(const Matrix& c, int k_bma, const SsmfOptions& opts = {});
BmaResult factorize(const ConsensusMatrix& c, int k_bma, const SsmfOptions& opts = {});

/// 1 - max_k A_ik per row: the probability that the modal cluster is wrong.
std::vector<double> allocation_uncertainty(const Matrix& a);

/// Largest K_m across the models.
int suggest_k_bma(std::span<const AllocationMatrix> models);

}  // namespace bmaclust
