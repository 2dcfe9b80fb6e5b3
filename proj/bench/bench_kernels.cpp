// Serial reference vs OpenMP kernels at the matrix sizes the pipeline sees.

#include "bmaclust/kernels.hpp"
#include "bmaclust/random.hpp"
#include "bmaclust/ssmf.hpp"

#include <benchmark/benchmark.h>

namespace {

using bmaclust::Matrix;

Matrix random_simplex_rows(Eigen::Index n, Eigen::Index k, std::uint64_t seed) {
  bmaclust::Rng rng(seed);
  Matrix a(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) a(i, j) = bmaclust::uniform01(rng);
    a.row(i) /= a.row(i).sum();
  }
  return a;
}

template <void (*Kernel)(const Matrix&, Matrix&)>
void BM_CoAssignment(benchmark::State& state) {
  const Matrix a = random_simplex_rows(state.range(0), 5, 1);
  Matrix out;
  for (auto _ : state) {
    Kernel(a, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <void (*Kernel)(const Matrix&, Matrix&)>
void BM_PairwiseDistances(benchmark::State& state) {
  const Matrix x = random_simplex_rows(state.range(0), 8, 2);
  Matrix out;
  for (auto _ : state) {
    Kernel(x, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <void (*Kernel)(const Matrix&, const Matrix&, Matrix&)>
void BM_GramProduct(benchmark::State& state) {
  const Matrix a = random_simplex_rows(state.range(0), 5, 3);
  const Matrix c = a * a.transpose();
  Matrix out;
  for (auto _ : state) {
    Kernel(c, a, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <void (*Kernel)(std::span<const Matrix* const>, std::span<const double>, Matrix&)>
void BM_WeightedAverage(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  std::vector<Matrix> mats;
  for (std::uint64_t m = 0; m < 3; ++m) {
    const Matrix a = random_simplex_rows(n, 5, 10 + m);
    mats.push_back(a * a.transpose());
  }
  const std::vector<const Matrix*> ptrs{&mats[0], &mats[1], &mats[2]};
  const std::vector<double> w{0.2, 0.3, 0.5};
  Matrix out;
  for (auto _ : state) {
    Kernel(ptrs, w, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Factorize(benchmark::State& state) {
  const Matrix a = random_simplex_rows(state.range(0), 5, 4);
  const Matrix c = a * a.transpose();
  bmaclust::SsmfOptions opts;
  opts.restarts = 2;
  opts.max_iter = 50;
  for (auto _ : state) {
    auto r = bmaclust::factorize(c, 5, opts);
    benchmark::DoNotOptimize(r.allocation.data());
  }
}

namespace ser = bmaclust::kernels::serial;
namespace par = bmaclust::kernels::parallel;

BENCHMARK(BM_CoAssignment<ser::co_assignment>)->Name("co_assignment/serial")->Arg(100)->Arg(500);
BENCHMARK(BM_CoAssignment<par::co_assignment>)->Name("co_assignment/omp")->Arg(100)->Arg(500);
BENCHMARK(BM_PairwiseDistances<ser::pairwise_distances>)->Name("pairwise_distances/serial")->Arg(100)->Arg(500);
BENCHMARK(BM_PairwiseDistances<par::pairwise_distances>)->Name("pairwise_distances/omp")->Arg(100)->Arg(500);
BENCHMARK(BM_GramProduct<ser::gram_product>)->Name("gram_product/serial")->Arg(100)->Arg(500);
BENCHMARK(BM_GramProduct<par::gram_product>)->Name("gram_product/omp")->Arg(100)->Arg(500);
BENCHMARK(BM_WeightedAverage<ser::weighted_average>)->Name("weighted_average/serial")->Arg(100)->Arg(500);
BENCHMARK(BM_WeightedAverage<par::weighted_average>)->Name("weighted_average/omp")->Arg(100)->Arg(500);
BENCHMARK(BM_Factorize)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
