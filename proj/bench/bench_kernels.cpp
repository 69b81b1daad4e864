#include <benchmark/benchmark.h>

#include "randfeat/data.hpp"
#include "randfeat/features.hpp"
#include "randfeat/harmonics.hpp"
#include "randfeat/kernels.hpp"

using namespace randfeat;

static void BM_StreamedGram(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  const auto data = synthetic1(1, 200, 10);
  const auto act = Activation::relu();
  for (auto _ : state) {
    benchmark::DoNotOptimize(streamed_gram(data.points, 8192, WeightDistribution::UniformSphere, 7, act, parallel));
  }
  state.SetLabel(parallel ? "openmp" : "serial");
}
BENCHMARK(BM_StreamedGram)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_PopulationMatrix(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  const auto data = uniform_sphere(400, 10, 3);
  auto f = [](double t) { return relu_phi(t, 10); };
  for (auto _ : state) {
    if (parallel) {
      benchmark::DoNotOptimize(kernels::parallel::population_matrix(data.points, f));
    } else {
      benchmark::DoNotOptimize(kernels::serial::population_matrix(data.points, f));
    }
  }
  state.SetLabel(parallel ? "openmp" : "serial");
}
BENCHMARK(BM_PopulationMatrix)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_ApplyActivation(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  const auto act = Activation::swish();
  const Eigen::MatrixXd base = Eigen::MatrixXd::Random(500, 4000);
  for (auto _ : state) {
    Eigen::MatrixXd p = base;
    if (parallel) {
      kernels::parallel::apply_activation(p, act, kernels::ActivationDomain::Sphere);
    } else {
      kernels::serial::apply_activation(p, act, kernels::ActivationDomain::Sphere);
    }
    benchmark::DoNotOptimize(p.data());
  }
  state.SetLabel(parallel ? "openmp" : "serial");
}
BENCHMARK(BM_ApplyActivation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
