// Serial reference kernel against the OpenMP kernel on the same ensembles.

#include "hessmc/ensemble.hpp"
#include "hessmc/estimators.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace hessmc;

namespace {

void sphere_hessian(benchmark::State& state, bool serial)
{
    const auto model = ManifoldModel::sphere(2);
    const auto f = ScalarFunctional::sphere_linear(Vec::Unit(3, 2));
    const Point x = point_at(model, 0.5);
    const auto n_paths = static_cast<std::size_t>(state.range(0));
    EstimatorOptions opts;
    opts.n_steps = 100;
    opts.serial = serial;
    for (auto _ : state) benchmark::DoNotOptimize(estimate_hessian(model, f, x, 1.0, n_paths, 1, opts));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void flat_gradient(benchmark::State& state, bool serial)
{
    const auto model = ManifoldModel::euclidean(3);
    const auto f = ScalarFunctional::gaussian_bump(Vec::Zero(3), 1.0, 1.0);
    const Point x{Vec::Constant(3, 0.4)};
    const auto n_paths = static_cast<std::size_t>(state.range(0));
    EstimatorOptions opts;
    opts.n_steps = 100;
    opts.serial = serial;
    for (auto _ : state) benchmark::DoNotOptimize(estimate_gradient(model, f, x, 1.0, n_paths, 1, opts));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

// Kernel overhead alone: a sampler that does almost nothing.
void bare_kernel(benchmark::State& state, bool serial)
{
    const auto n_paths = static_cast<std::size_t>(state.range(0));
    const PathSampler sampler = [](std::uint64_t i, std::span<double> out) {
        out[0] = std::sin(static_cast<double>(i));
        out[1] = out[0] * out[0];
        return true;
    };
    for (auto _ : state) {
        auto r = serial ? run_ensemble_serial(n_paths, 2, sampler) : run_ensemble_parallel(n_paths, 2, sampler);
        benchmark::DoNotOptimize(r.moments.mean(0));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(sphere_hessian, serial, true)->Arg(1 << 12)->Arg(1 << 15)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sphere_hessian, openmp, false)->Arg(1 << 12)->Arg(1 << 15)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(flat_gradient, serial, true)->Arg(1 << 15)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(flat_gradient, openmp, false)->Arg(1 << 15)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bare_kernel, serial, true)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bare_kernel, openmp, false)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
