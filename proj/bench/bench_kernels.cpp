// Serial references against the OpenMP kernels.

#include <benchmark/benchmark.h>

#include <map>

#include "gms/esums.hpp"
#include "gms/geometry.hpp"
#include "gms/kernels.hpp"
#include "gms/solver.hpp"

namespace {

using namespace gms;

const DiskConfiguration& config(int n) {
  static std::map<int, DiskConfiguration> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, rsa_generate(Cell::square(), n, radius_for(n, 0.3), 99)).first;
  return it->second;
}

void BM_KernelCache(benchmark::State& state, KernelCache::Build build) {
  const auto& c = config(int(state.range(0)));
  for (auto _ : state) {
    KernelCache K(c, 12, build);
    benchmark::DoNotOptimize(K);
  }
}

template <bool Serial>
void BM_Esum(benchmark::State& state) {
  const auto& c = config(int(state.range(0)));
  const KernelCache K(c, 6);
  const MultiIndex idx{3, 3, 2, 2, 4, 2};
  for (auto _ : state) benchmark::DoNotOptimize(Serial ? esum_serial(K, idx) : esum(K, idx));
}

template <bool Serial>
void BM_ApplyW(benchmark::State& state) {
  const auto& c = config(int(state.range(0)));
  const KernelCache K(c, kernel_order_for(kDefaultDegree));
  const auto f = TaylorField::constant(c.size(), kDefaultDegree);
  for (auto _ : state) {
    auto g = Serial ? apply_w_serial(K, c.radius(), f) : apply_w(K, c.radius(), f);
    benchmark::DoNotOptimize(g);
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_KernelCache, serial, KernelCache::Build::serial)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(BM_KernelCache, parallel, KernelCache::Build::parallel)->Arg(64)->Arg(256);
BENCHMARK_TEMPLATE(BM_Esum, true)->Arg(64)->Arg(256);
BENCHMARK_TEMPLATE(BM_Esum, false)->Arg(64)->Arg(256);
BENCHMARK_TEMPLATE(BM_ApplyW, true)->Arg(64)->Arg(256);
BENCHMARK_TEMPLATE(BM_ApplyW, false)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
