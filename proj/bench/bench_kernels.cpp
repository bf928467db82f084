// Parallel kernels against their serial references. Run with
// OMP_NUM_THREADS set to compare thread counts; the results are identical.

#include <benchmark/benchmark.h>

#include "medrl/brute_force.hpp"
#include "medrl/dataset.hpp"
#include "medrl/growth_model.hpp"

using namespace medrl;

namespace {

LoopConfig noiseless() {
  LoopConfig c;
  for (Var v : kAllVars) c.env.actuators[v].noise_sigma = 0.0;
  return c;
}

void BM_BruteForce(benchmark::State& state) {
  const LoopConfig c = noiseless();
  const ActionGrid grid(c.env.actuators, {3, 3, 3, 3});
  const auto horizon = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_optimum(c, grid, horizon, 1));
}

void BM_BruteForceSerial(benchmark::State& state) {
  const LoopConfig c = noiseless();
  const ActionGrid grid(c.env.actuators, {3, 3, 3, 3});
  const auto horizon = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_optimum_serial(c, grid, horizon, 1));
}

void BM_GenerateDataset(benchmark::State& state) {
  const LoopConfig c;
  const auto sched = random_hold_schedule(c.env.actuators, 12);
  const auto episodes = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_dataset(c, sched, episodes, 288, 1));
}

void BM_GenerateDatasetSerial(benchmark::State& state) {
  const LoopConfig c;
  const auto sched = random_hold_schedule(c.env.actuators, 12);
  const auto episodes = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_dataset_serial(c, sched, episodes, 288, 1));
}

struct LossFixture {
  std::vector<WindowSample> samples;
  GrowthModel model = GrowthModel::zero(4, 32);
  LossFixture() {
    const LoopConfig c;
    samples = build_windows(generate_dataset(c, random_hold_schedule(c.env.actuators, 12), 50, 288, 2), 4);
    Rng rng(3);
    model.net.init_glorot(rng);
  }
};

const LossFixture& loss_fixture() {
  static const LossFixture f;
  return f;
}

void BM_DatasetLoss(benchmark::State& state) {
  const LossFixture& f = loss_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(dataset_loss(f.model, f.samples));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * f.samples.size()));
}

void BM_DatasetLossSerial(benchmark::State& state) {
  const LossFixture& f = loss_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(dataset_loss_serial(f.model, f.samples));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * f.samples.size()));
}

}  // namespace

BENCHMARK(BM_BruteForce)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceSerial)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateDataset)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateDatasetSerial)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DatasetLoss)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DatasetLossSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
