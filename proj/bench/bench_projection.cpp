// Serial vs OpenMP block projection on the cone layout of a bi-martingale program.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "bmot/conic/kernels.hpp"

using namespace bmot::conic;

namespace {

struct Layout {
  std::vector<ConeSlice> slices;
  std::vector<double> point;
};

// One Power(1/p, d + 2) block per (i, j) pair, as build() lays them out.
Layout make_layout(std::size_t pairs, std::size_t dim, double alpha) {
  Layout l;
  const ConeBlock b = ConeBlock::power(alpha, dim + 2);
  for (std::size_t k = 0; k < pairs; ++k) l.slices.push_back({b, k * b.size});
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  l.point.resize(pairs * b.size);
  for (double& v : l.point) v = n(rng);
  return l;
}

template <std::size_t (*Kernel)(std::span<double>, std::span<const ConeSlice>, bool)>
void run(benchmark::State& state) {
  const Layout l = make_layout(static_cast<std::size_t>(state.range(0)), 2, state.range(1) == 2 ? 0.5 : 0.25);
  std::vector<double> work(l.point.size());
  for (auto _ : state) {
    work = l.point;
    benchmark::DoNotOptimize(Kernel(work, l.slices, false));
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void serial(benchmark::State& s) { run<project_blocks_serial>(s); }
void parallel(benchmark::State& s) { run<project_blocks_parallel>(s); }

// pairs: 8 x 4 .. 14641 x 5 (the 121 x 121 example); p = 2 and p = 4
void args(benchmark::internal::Benchmark* b) {
  for (long pairs : {32L, 1024L, 16384L, 73205L}) {
    for (long p : {2L, 4L}) b->Args({pairs, p});
  }
}

}  // namespace

BENCHMARK(serial)->Apply(args)->ArgNames({"pairs", "p"});
BENCHMARK(parallel)->Apply(args)->ArgNames({"pairs", "p"})->UseRealTime();

BENCHMARK_MAIN();
