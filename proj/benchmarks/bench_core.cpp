#include <benchmark/benchmark.h>

#include <random>

#include "splatseg/fit.hpp"
#include "splatseg/levelset.hpp"
#include "splatseg/loss.hpp"
#include "splatseg/metrics.hpp"
#include "splatseg/splat.hpp"
#include "splatseg/synth.hpp"

using namespace splatseg;

namespace {

GaussianSplat centered(int n) {
  return {0.5 * n + 0.3, 0.45 * n, 0.15 * n, 0.09 * n, 0.4};
}

BinaryMask random_mask(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution on(0.3);
  std::vector<std::uint8_t> v(static_cast<std::size_t>(n) * n);
  for (auto& x : v) x = on(rng);
  v[0] = 1;
  v[1] = 0;
  return {{n, n}, std::move(v)};
}

void BM_Render(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GaussianSplat s = centered(n);
  for (auto _ : state) benchmark::DoNotOptimize(render(s, {n, n}));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Render)->RangeMultiplier(2)->Range(32, 512);

void BM_RenderBackward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GaussianSplat s = centered(n);
  const ScalarField up({n, n}, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(render_backward(s, up));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_RenderBackward)->RangeMultiplier(2)->Range(32, 512);

void BM_SignedEdt(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const BinaryMask m = random_mask(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(signed_squared_edt(m));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_SignedEdt)->RangeMultiplier(2)->Range(16, 512);

void BM_BruteForceEdt(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const BinaryMask m = random_mask(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_signed_squared_edt(m));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_BruteForceEdt)->RangeMultiplier(2)->Range(16, 64);

void BM_DualObjectiveGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Dims d{n, n};
  const GaussianSplat s = centered(n);
  const BinaryMask target = threshold(render(s, d), 0.5);
  GaussianSplat off = s;
  off.mu_x += 1.5;
  const LevelSetField lsf = signed_edt(threshold(render(off, d), 0.5));
  const DualTaskObjective objective(d, target, LossWeights{});
  DualTaskObjective::Gradient grad;
  for (auto _ : state) benchmark::DoNotOptimize(objective.evaluate(s, &lsf, grad));
}
BENCHMARK(BM_DualObjectiveGradient)->Arg(64)->Arg(128)->Arg(256);

void BM_FitSplat(benchmark::State& state) {
  const Dims d{64, 64};
  const BinaryMask target = generate(sample_shape(ShapeKind::ellipse, d, 3), d).mask;
  const GaussianSplat init = moment_match(target);
  int epochs = 0;
  for (auto _ : state) {
    const FitResult r = fit_splat(target, init, LossWeights{});
    epochs += r.epochs_run;
    benchmark::DoNotOptimize(r.splat);
  }
  state.counters["epochs"] = benchmark::Counter(epochs, benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_FitSplat)->Unit(benchmark::kMillisecond);

void BM_RocAuc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> s(n);
  std::vector<std::uint8_t> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = u(rng);
    y[i] = static_cast<std::uint8_t>(i % 3 == 0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(roc_auc(s, y));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_RocAuc)->Range(1 << 10, 1 << 18);

}  // namespace

BENCHMARK_MAIN();
