// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "klessydra/assembler.hpp"
#include "klessydra/reference.hpp"
#include "kernels.hpp"

using namespace klessydra;

namespace {

void run_kernel(benchmark::State& state, const CoreConfig& cfg, const std::string& src) {
  const Memory image = kernels::load(src);
  std::uint64_t cycles = 0;
  for (auto _ : state) {
    Core core(cfg, image);
    cycles += core.run(50'000'000).cycles;
  }
  state.counters["cycles/s"] = benchmark::Counter(static_cast<double>(cycles), benchmark::Counter::kIsRate);
}

void BM_StraightLine(benchmark::State& state) {
  run_kernel(state, CoreConfig::preset("T034"), kernels::straight_line(static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_StraightLine)->Arg(1000)->Arg(10000);

void BM_Loop(benchmark::State& state) {
  run_kernel(state, CoreConfig::preset("T023"), kernels::loop(static_cast<unsigned>(state.range(0)), 8));
}
BENCHMARK(BM_Loop)->Arg(1000);

void BM_Lock(benchmark::State& state) {
  run_kernel(state, CoreConfig::preset("T024"), kernels::lock(100));
}
BENCHMARK(BM_Lock);

void BM_MemoryWaits(benchmark::State& state) {
  auto cfg = CoreConfig::preset("T023");
  cfg.grant_wait = 1;
  cfg.valid_wait = 2;
  run_kernel(state, cfg, kernels::loads(2000));
}
BENCHMARK(BM_MemoryWaits);

void BM_Random(benchmark::State& state) {
  std::mt19937 rng(1);
  std::vector<Memory> images;
  for (int i = 0; i < 32; ++i) images.push_back(kernels::load(kernels::random_program(rng)));
  const auto cfg = CoreConfig::preset("T034");
  std::size_t i = 0;
  for (auto _ : state) {
    Core core(cfg, images[i++ % images.size()]);
    benchmark::DoNotOptimize(core.run(1'000'000));
  }
}
BENCHMARK(BM_Random);

void BM_Reference(benchmark::State& state) {
  const Memory image = kernels::load(kernels::loop(1000, 8));
  const auto cfg = CoreConfig::preset("T023");
  for (auto _ : state) benchmark::DoNotOptimize(run_reference(cfg, image, 10'000'000).run.cycles);
}
BENCHMARK(BM_Reference);

void BM_Assemble(benchmark::State& state) {
  std::mt19937 rng(2);
  const auto src = kernels::random_program(rng);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(src).bytes());
}
BENCHMARK(BM_Assemble);

}  // namespace
BENCHMARK_MAIN();
