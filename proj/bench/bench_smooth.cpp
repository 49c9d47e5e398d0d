// Serial reference smoother vs the OpenMP kernel, plus one bootstrap
// replicate, on the simulation design's shapes.

#include "specop/bootstrap.hpp"
#include "specop/simulation.hpp"
#include "specop/spectral.hpp"
#include "specop/statistic.hpp"

#include <benchmark/benchmark.h>

namespace {

specop::DftField make_dft(specop::Index T, specop::Index k) {
  specop::Rng rng(7);
  const specop::MaProcessSpec spec{{0.8}, T, k};
  return specop::dft(specop::center(specop::generate_ma(spec, rng)));
}

void BM_SmoothReference(benchmark::State& state) {
  const auto J = make_dft(state.range(0), state.range(1));
  const auto W = specop::make_weight_kernel(specop::KernelName::epanechnikov_pi);
  for (auto _ : state) {
    benchmark::DoNotOptimize(specop::reference::smooth(J, W, 0.2));
  }
}

void BM_SmoothParallel(benchmark::State& state) {
  const auto J = make_dft(state.range(0), state.range(1));
  const auto W = specop::make_weight_kernel(specop::KernelName::epanechnikov_pi);
  for (auto _ : state) {
    benchmark::DoNotOptimize(specop::smooth(J, W, 0.2));
  }
  state.counters["threads"] = specop::available_threads();
}

void BM_BootstrapReplicate(benchmark::State& state) {
  const auto J = make_dft(state.range(0), state.range(1));
  const auto W = specop::make_weight_kernel(specop::KernelName::epanechnikov_pi);
  const auto F = specop::smooth(J, W, 0.2);
  const auto factor = specop::psd_factorize(F);
  const specop::DataConstants data{specop::mu0_hat(F, W),
                                   specop::theta0_hat(F, W)};
  specop::Rng rng(11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        specop::bootstrap_replicate(factor, W, 0.2, data, rng));
  }
}

}  // namespace

BENCHMARK(BM_SmoothReference)->Args({100, 21})->Args({200, 21})->Args({92, 96});
BENCHMARK(BM_SmoothParallel)->Args({100, 21})->Args({200, 21})->Args({92, 96});
BENCHMARK(BM_BootstrapReplicate)->Args({100, 21})->Args({200, 21});

BENCHMARK_MAIN();
