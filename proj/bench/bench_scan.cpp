#include <benchmark/benchmark.h>

#include "fj/checkpoints.hpp"
#include "fj/scan.hpp"

namespace {

const fj::Axis kLambda{fj::ScanParam::lambda, 0.0, 2.0, 101};
const fj::Axis kDrive{fj::ScanParam::two_eps_over_omega, 0.0, 8.0, 201};

void BM_ScanSerial(benchmark::State& state) {
  const auto tmpl = fj::figures::balanced(2, 0.2, 0.0, 0.0);
  for (auto _ : state) {
    auto g = fj::scan_serial(tmpl, kLambda, kDrive, fj::ScanQuantity::re_rho_even);
    benchmark::DoNotOptimize(g.values.data());
  }
}

void BM_ScanParallel(benchmark::State& state) {
  const auto tmpl = fj::figures::balanced(2, 0.2, 0.0, 0.0);
  fj::ScanOptions opts;
  opts.threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto g = fj::scan(tmpl, kLambda, kDrive, fj::ScanQuantity::re_rho_even, opts);
    benchmark::DoNotOptimize(g.values.data());
  }
}

}  // namespace

BENCHMARK(BM_ScanSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScanParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
