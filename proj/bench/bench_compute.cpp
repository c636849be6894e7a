// Serial reference vs OpenMP kernels on growing sample counts.

#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "lmmk/compute.hpp"
#include "lmmk/synthetic.hpp"

namespace {

using namespace lmmk;

constexpr int kKernels = 10;

struct Fixture {
  Matrix features;
  Labels labels;
  std::vector<Matrix> kernels;
  std::vector<Vector> diagonals;
  std::vector<double> beta;
  Matrix dist;
};

const Fixture& fixture(Index n) {
  static std::map<Index, Fixture> cache;
  auto [it, inserted] = cache.try_emplace(n);
  Fixture& f = it->second;
  if (!inserted) return f;
  SyntheticSpec spec;
  spec.per_class = static_cast<int>(n / spec.n_classes);
  spec.noise = kKernels - spec.informative;
  auto data = make_gaussian_classes(spec, 1);
  f.features = std::move(data.features);
  f.labels = std::move(data.labels);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Index m = 0; m < f.features.cols(); ++m) {
    const Matrix col = f.features.col(m);
    const Matrix d = serial::absolute_difference_distances({col.data(), static_cast<std::size_t>(col.size())});
    f.kernels.push_back(serial::gaussian(d, 1.0));
    f.diagonals.push_back(Vector::Ones(col.size()));
    f.beta.push_back(u(rng));
  }
  f.dist = serial::rkhs_distances(f.kernels, f.diagonals, f.diagonals, f.beta);
  return f;
}

template <bool Parallel>
void BM_EuclideanDistances(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(Parallel ? omp::euclidean_distances(f.features) : serial::euclidean_distances(f.features));
}

template <bool Parallel>
void BM_Gaussian(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Parallel ? omp::gaussian(f.dist, 2.0) : serial::gaussian(f.dist, 2.0));
}

template <bool Parallel>
void BM_RkhsDistances(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(Parallel ? omp::rkhs_distances(f.kernels, f.diagonals, f.diagonals, f.beta)
                                      : serial::rkhs_distances(f.kernels, f.diagonals, f.diagonals, f.beta));
}

template <bool Parallel>
void BM_NearestByLabel(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(Parallel ? omp::nearest_by_label(f.dist, f.labels, 3, LabelFilter::Different)
                                      : serial::nearest_by_label(f.dist, f.labels, 3, LabelFilter::Different));
}

template <bool Parallel>
void BM_KnnVote(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(Parallel ? omp::knn_vote(f.dist, f.labels, 5) : serial::knn_vote(f.dist, f.labels, 5));
}

#define LMMK_BENCH_PAIR(fn)                                                                 \
  BENCHMARK_TEMPLATE(fn, false)->Name(#fn "/serial")->RangeMultiplier(2)->Range(150, 1200); \
  BENCHMARK_TEMPLATE(fn, true)->Name(#fn "/omp")->RangeMultiplier(2)->Range(150, 1200)

LMMK_BENCH_PAIR(BM_EuclideanDistances);
LMMK_BENCH_PAIR(BM_Gaussian);
LMMK_BENCH_PAIR(BM_RkhsDistances);
LMMK_BENCH_PAIR(BM_NearestByLabel);
LMMK_BENCH_PAIR(BM_KnnVote);

}  // namespace

BENCHMARK_MAIN();
