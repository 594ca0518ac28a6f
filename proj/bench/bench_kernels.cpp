#include "mollerlab/kernels.hpp"
#include "mollerlab/wave.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace mollerlab;

namespace {

Metric1p1 lumpy() {
  return Metric1p1([](double t, double x) { return 1.0 + 0.1 * std::cos(x) * std::exp(-t * t); },
                   [](double, double x) { return 0.8 + 0.16 * std::sin(x); }, "lumpy");
}

SHSystem system() { return reduce_to_shs(wave_operator(lumpy(), 1.0)); }

std::vector<SliceData> batch(int Nx, int count) {
  std::vector<SliceData> out;
  for (int b = 0; b < count; ++b) {
    SliceData s(Nx, 3);
    for (int i = 0; i < Nx; ++i) s(i, 2) = std::cos((b + 1) * 2.0 * M_PI * i / Nx);
    out.push_back(std::move(s));
  }
  return out;
}

void BM_TableBuild(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  const Grid grid = Grid::make(static_cast<int>(state.range(1)), 64, 0.0, 0.5);
  const SHSystem sys = system();
  for (auto _ : state) benchmark::DoNotOptimize(SystemTable::build(sys, grid, parallel));
}

void BM_Rhs(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  const int Nx = static_cast<int>(state.range(1));
  const Grid grid = Grid::make(Nx, 4, 0.0, 0.01);
  const SystemTable table = SystemTable::build(system(), grid);
  const SliceData y = batch(Nx, 1)[0];
  const SliceData dxy = d_dx(y);
  SliceData dy(Nx, 3);
  for (auto _ : state) {
    if (parallel) {
      rhs_parallel(table, 3, y.values(), dxy.values(), {}, dy.values());
    } else {
      rhs_serial(table, 3, y.values(), dxy.values(), {}, dy.values());
    }
    benchmark::DoNotOptimize(dy.values().data());
  }
}

void BM_EvolveBatch(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  const Grid grid = Grid::make(128, 100, 0.0, 0.5);
  const SHSystem sys = system();
  const auto data = batch(grid.Nx, static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel ? evolve_batch(sys, grid, data, 0, 20, {})
                                      : evolve_batch_serial(sys, grid, data, 0, 20, {}));
  }
}

}  // namespace

BENCHMARK(BM_TableBuild)->ArgsProduct({{0, 1}, {64, 256}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Rhs)->ArgsProduct({{0, 1}, {256, 1024}});
BENCHMARK(BM_EvolveBatch)->ArgsProduct({{0, 1}, {8, 32}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
