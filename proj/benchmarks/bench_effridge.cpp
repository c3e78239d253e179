#include <benchmark/benchmark.h>

#include "effridge/effective_ridge.hpp"
#include "effridge/feature_sampler.hpp"
#include "effridge/predictors.hpp"
#include "effridge/stieltjes.hpp"

#include <cmath>

using namespace effridge;

namespace {

Vector exponential_spectrum(Eigen::Index n) {
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = std::exp(-static_cast<double>(i) / 2.0);
  return d;
}

Vector polynomial_spectrum(Eigen::Index n) {
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = 1.0 / static_cast<double>(i + 1);
  return d;
}

void BM_SolveEffectiveRidge(benchmark::State& state) {
  const Vector d = polynomial_spectrum(state.range(0));
  double lambda = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_effective_ridge({d, 2.0, lambda}));
    lambda = lambda < 1.0 ? lambda * 1.01 : 1e-3;
  }
}
BENCHMARK(BM_SolveEffectiveRidge)->Arg(20)->Arg(200)->Arg(2000);

void BM_RidgelessLimit(benchmark::State& state) {
  const Vector d = exponential_spectrum(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ridgeless_limit(d, 0.5));
}
BENCHMARK(BM_RidgelessLimit)->Arg(20)->Arg(200);

void BM_SampleGaussianFeatures(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Matrix root = polynomial_spectrum(2 * n).cwiseSqrt().asDiagonal();
  std::uint64_t trial = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_gaussian_features(root, 2 * n, n, SeedPolicy{1, trial++}));
  }
}
BENCHMARK(BM_SampleGaussianFeatures)->Arg(50)->Arg(200);

void BM_FitRF(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::Index P = state.range(1);
  const Matrix root = polynomial_spectrum(n).cwiseSqrt().asDiagonal();
  const auto F = sample_gaussian_features(root, P, n, SeedPolicy{1, 0});
  const Vector y = Vector::Ones(n);
  const Matrix train = F.train();
  for (auto _ : state) benchmark::DoNotOptimize(fit_rf(train, y, 0.1));
}
BENCHMARK(BM_FitRF)->Args({100, 50})->Args({100, 400})->Args({400, 400});

void BM_TheoreticalStieltjesComplex(benchmark::State& state) {
  const Vector d = exponential_spectrum(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(theoretical_stieltjes(d, 0.5, Complex(-0.3, 0.8)));
}
BENCHMARK(BM_TheoreticalStieltjesComplex)->Arg(50)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
