#include <benchmark/benchmark.h>

#include <random>

#include "pcl/lab.hpp"
#include "pcl/multiplier.hpp"
#include "pcl/operators.hpp"
#include "pcl/parallel.hpp"

using namespace pcl;

namespace {

const ntheory::ArithmeticTables& tables() {
    static const auto t = ntheory::build_tables(1 << 18);
    return t;
}

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

void label(benchmark::State& s) { s.SetLabel(s.range(0) ? "parallel" : "serial"); }

void BM_maximal(benchmark::State& s) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto f = operators::LatticeFunction::zeros(0, 1 << 14);
    for (auto& v : f.values) v = u(rng);
    const auto scales = operators::DyadicScaleSet::up_to(1 << 16);
    for (auto _ : s) benchmark::DoNotOptimize(operators::maximal(f, scales, tables(), exec_of(s)));
    label(s);
}

void BM_low_kernel_range(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(operators::low_kernel_range(-500, 500, 8, 1 << 10, exec_of(s)));
    label(s);
}

void BM_on_grid(benchmark::State& s) {
    auto p = multiplier::scaled_grh_preset();
    const multiplier::MultiplierModel B(multiplier::ModelKind::B, 1 << 14, p);
    for (auto _ : s) benchmark::DoNotOptimize(B.on_grid(1 << 14, exec_of(s)));
    label(s);
}

void BM_set_search(benchmark::State& s) {
    for (auto _ : s)
        benchmark::DoNotOptimize(lab::set_search(1024, {0, 1024}, lab::Strategy::RandomDensity, 32, 7, tables(), exec_of(s)));
    label(s);
}

}  // namespace

BENCHMARK(BM_maximal)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_low_kernel_range)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_on_grid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_set_search)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
