#pragma once

// Data-parallel inner loops of the pipeline. Every kernel exists twice: a
// plain serial reference and an OpenMP version that partitions output rows
// across threads. Each output element is computed by exactly one thread with
// the same operation order as the serial version, so the two are
// bit-identical for any thread count.

#include "bmaclust/types.hpp"

#include <span>

namespace bmaclust::kernels {

namespace serial {

/// out(i,j) = sum_k p(i,k) p(j,k) with the K products summed in ascending
/// order (so the result does not depend on column order); diagonal set to 1.
void co_assignment(const Matrix& probs, Matrix& out);

/// out = sum_m w_m mats[m], diagonal forced to 1, entries clamped to [0,1].
void weighted_average(std::span<const Matrix* const> mats, std::span<const double> w,
                      Matrix& out);

/// out(i,j) = Euclidean distance between rows i and j of x.
void pairwise_distances(const Matrix& x, Matrix& out);

/// out = c * a for square c (N x N) and a (N x K).
void gram_product(const Matrix& c, const Matrix& a, Matrix& out);

}  // namespace serial

namespace parallel {

void co_assignment(const Matrix& probs, Matrix& out);
void weighted_average(std::span<const Matrix* const> mats, std::span<const double> w,
                      Matrix& out);
void pairwise_distances(const Matrix& x, Matrix& out);
void gram_product(const Matrix& c, const Matrix& a, Matrix& out);

}  // namespace parallel

/// Thread cap from BMA_CLUSTER_THREADS (0 when unset or invalid).
int thread_cap_from_env();

/// Applies thread_cap_from_env() to the OpenMP runtime, if set.
void apply_thread_cap_from_env();

}  // namespace bmaclust::kernels
