// Serial reference against the OpenMP kernels on the same inputs.

#include <benchmark/benchmark.h>

#include "uip/hedger.hpp"
#include "uip/market_model.hpp"
#include "uip/pricer.hpp"
#include "uip/quadrature.hpp"

namespace {

using namespace uip;

Execution backend(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial() : Execution::openmp();
}

void hedge_paths(benchmark::State& state) {
  const BachelierModel model = BachelierModel::make({8.0}, {0.0}, make_spd(Matrix{{1.0}}), 1.0);
  const Pricer pricer(1.0, model, Payoff::basket_call({1.0}, -8.0));
  const TrackingHedger hedger(pricer, 0.1, TimeGrid::make(1000, 1.0));
  const double phi0[] = {0.0};
  const Execution exec = backend(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hedge_outcomes(hedger, model, phi0, 256, 7, exec));
  }
  state.SetItemsProcessed(state.iterations() * 256);
}

void quadrature_2d(benchmark::State& state) {
  const QuadratureRule rule = default_rule(2);
  const Execution exec = backend(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        integrate(rule, [](std::span<const double> z) { return std::max(z[0] + 0.5 * z[1], 0.0); }, exec));
  }
}

}  // namespace

BENCHMARK(hedge_paths)->Arg(0)->Arg(1)->ArgName("openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(quadrature_2d)->Arg(0)->Arg(1)->ArgName("openmp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
