#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "landscape/augment.hpp"
#include "landscape/optimize.hpp"
#include "landscape/tensor.hpp"

namespace {

using namespace landscape;

AugmentedObjective circles_objective(std::size_t width) {
  NetworkSpec spec;
  spec.input_dim = 2;
  spec.widths = {width, width};
  spec.activation = Activation::parse("tanh");
  const auto mode = Augmentation::skip_exp();
  return AugmentedObjective(TrainingProblem(gen_circles(32, 0), ParamLayout(spec, mode), {HingeLoss(3), 0.1, mode}));
}

void BM_Gradient(benchmark::State& state) {
  const auto f = circles_objective(static_cast<std::size_t>(state.range(0)));
  const auto p = random_init(f.problem().layout.spec(), Augmentation::skip_exp(), 0.5, 1);
  for (auto _ : state) benchmark::DoNotOptimize(grad(f, p.values()));
  state.counters["params"] = static_cast<double>(f.dimension());
}
BENCHMARK(BM_Gradient)->Arg(2)->Arg(8)->Arg(16);

void BM_HessianVector(benchmark::State& state) {
  const auto f = circles_objective(static_cast<std::size_t>(state.range(0)));
  const auto p = random_init(f.problem().layout.spec(), Augmentation::skip_exp(), 0.5, 1);
  const std::vector<double> v(f.dimension(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(hvp(f, p.values(), v));
}
BENCHMARK(BM_HessianVector)->Arg(2)->Arg(8)->Arg(16);

void BM_SymMax(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(32);
  std::vector<double> x(32 * 3);
  for (auto& v : c) v = u(rng);
  for (auto& v : x) v = 1.5 * u(rng);
  const WeightedPointTensor t(order, 3, c, x);
  for (auto _ : state) benchmark::DoNotOptimize(sym_max(t));
}
BENCHMARK(BM_SymMax)->DenseRange(1, 4);

void BM_MinimizeXor(benchmark::State& state) {
  NetworkSpec spec;
  spec.input_dim = 2;
  spec.widths = {2};
  spec.activation = Activation::parse("tanh");
  const auto mode = Augmentation::skip_exp();
  const AugmentedObjective f(TrainingProblem(gen_xor(), ParamLayout(spec, mode), {HingeLoss(3), 0.1, mode}));
  OptimizerConfig cfg;
  cfg.max_iters = 2000;
  const auto init = random_init(spec, mode, 1.0, 0);
  for (auto _ : state) benchmark::DoNotOptimize(minimize(f, init.values(), cfg));
}
BENCHMARK(BM_MinimizeXor)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
