#include <benchmark/benchmark.h>

#include <random>

#include "gsd/detector.hpp"
#include "gsd/em.hpp"
#include "gsd/gaussian.hpp"
#include "gsd/synthetic.hpp"

namespace {

std::vector<double> mixture(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> x(n);
  for (auto& v : x) v = (coin(rng) ? 2.0 : -2.0) + z(rng);
  return x;
}

void BM_SelectBoundary(benchmark::State& state) {
  const gsd::GaussianClassParams c0{-1.0, 0.8, 0.3};
  const gsd::GaussianClassParams c1{1.5, 1.7, 0.7};
  for (auto _ : state) benchmark::DoNotOptimize(gsd::select_boundary(c0, c1));
}
BENCHMARK(BM_SelectBoundary);

void BM_EmFit(benchmark::State& state) {
  const auto x = mixture(static_cast<std::size_t>(state.range(0)));
  const gsd::GaussianClassParams a{-1.0, 1.5, 0.5};
  const gsd::GaussianClassParams b{1.0, 1.5, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(gsd::em_fit(x, {a, b}, {}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EmFit)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_Train(benchmark::State& state) {
  const auto data = gsd::gen_hyperplane(3, static_cast<std::size_t>(state.range(0)), 10);
  for (auto _ : state) benchmark::DoNotOptimize(gsd::train(data, {}));
}
BENCHMARK(BM_Train)->Arg(2000)->Arg(6000)->Unit(benchmark::kMillisecond);

void BM_Detect(benchmark::State& state) {
  const auto model = gsd::train(gsd::gen_hyperplane(3, 6000, 10), {});
  auto batch = gsd::gen_hyperplane(4, static_cast<std::size_t>(state.range(0)), 10);
  batch.labels.reset();
  for (auto _ : state) benchmark::DoNotOptimize(gsd::detect(model, batch));
}
BENCHMARK(BM_Detect)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
