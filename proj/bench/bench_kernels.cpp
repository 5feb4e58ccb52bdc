// Serial reference vs OpenMP kernels. The second argument selects the mode
// (0 serial, 1 parallel).

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "qcopa/oracle.hpp"
#include "qcopa/runtime.hpp"

using namespace qcopa;

namespace {

Exec mode(const benchmark::State& state) {
  return state.range(1) ? Exec::parallel : Exec::serial;
}

NetworkConfig three_user(std::size_t n_power) {
  NetworkConfig cfg;
  cfg.gain = {2.5, 1.5, 2.0};
  cfg.p_max_dbm = {10, 13, 12};
  cfg.n_power = n_power;
  cfg.interferers = {{{1, 0.3}, {2, 0.2}}, {{0, 0.3}, {2, 0.4}}, {{0, 0.5}, {1, 0.1}}};
  return cfg;
}

std::vector<FunctionTable> dense_tables(std::size_t card) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10, 10);
  std::vector<FunctionTable> fns;
  for (Scope s : {Scope{0, 1, 2}, Scope{1, 2, 3}, Scope{0, 3}}) {
    std::vector<std::size_t> cards(s.size(), card);
    std::vector<double> values(static_cast<std::size_t>(std::pow(card, s.size())));
    for (auto& v : values) v = u(rng);
    fns.emplace_back(std::move(s), std::move(cards), std::move(values));
  }
  return fns;
}

void BM_GridOptimum(benchmark::State& state) {
  const auto cfg = three_user(static_cast<std::size_t>(state.range(0)));
  const auto grid = build_action_grid(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_grid_optimum(cfg, grid, mode(state)));
}

void BM_BruteForceArgmax(benchmark::State& state) {
  const auto fns = dense_tables(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_argmax(fns, mode(state)));
}

void BM_MaximizeOut(benchmark::State& state) {
  const auto fns = dense_tables(static_cast<std::size_t>(state.range(0)));
  std::vector<const FunctionTable*> ptrs;
  for (const auto& f : fns)
    if (f.contains(0)) ptrs.push_back(&f);
  VeOptions opts;
  opts.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(maximize_out(ptrs, 0, opts));
}

void BM_TrainingEpisodes(benchmark::State& state) {
  const auto cfg = three_user(static_cast<std::size_t>(state.range(0)));
  RuntimeOptions opts;
  opts.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(train(cfg, LearningParams{}, 200, 1, opts));
}

}  // namespace

BENCHMARK(BM_GridOptimum)->ArgsProduct({{40, 80}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceArgmax)->ArgsProduct({{12, 24}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MaximizeOut)->ArgsProduct({{24, 48}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainingEpisodes)->ArgsProduct({{11, 21}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
