#include <benchmark/benchmark.h>

#include <complex>

#include "osp/action.hpp"
#include "osp/discretize.hpp"
#include "osp/eigensolve.hpp"
#include "osp/graph.hpp"
#include "osp/registry.hpp"

namespace {

using osp::Complex;

const osp::QuadraticProfile kPoiseuille{1.0, 0.0, 0.0};

void BM_BuildChebyshev(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(osp::build_chebyshev(kPoiseuille, 0.01, n));
    }
}
BENCHMARK(BM_BuildChebyshev)->Arg(100)->Arg(300)->Arg(600);

void BM_BuildFiniteDifference(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(osp::build_finite_difference(kPoiseuille, 0.01, n));
    }
}
BENCHMARK(BM_BuildFiniteDifference)->Arg(1000)->Arg(4000);

void BM_ComputeSpectrumChebyshev(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const osp::DiscretizedOperator op = osp::build_chebyshev(kPoiseuille, 0.01, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(osp::compute_spectrum(op));
    }
}
BENCHMARK(BM_ComputeSpectrumChebyshev)->Arg(100)->Arg(200)->Arg(300)
    ->Unit(benchmark::kMillisecond);

void BM_ComputeSpectrumTridiagonal(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const osp::DiscretizedOperator op =
        osp::build_finite_difference(kPoiseuille, 0.01, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(osp::compute_spectrum(op));
    }
}
BENCHMARK(BM_ComputeSpectrumTridiagonal)->Arg(500)->Arg(1000)
    ->Unit(benchmark::kMillisecond);

void BM_IntegrateAction(benchmark::State& state) {
    const Complex lambda(0.4, -0.9);
    const osp::PathSpec path{{Complex(-1.0, 0.0), Complex(1.0, 0.0)}, {}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(osp::integrate_action(kPoiseuille, lambda, path));
    }
}
BENCHMARK(BM_IntegrateAction);

void BM_ConditionValue(benchmark::State& state) {
    const osp::Registry reg = osp::parse_registry(osp::default_registry_text());
    const osp::CurveCondition* stem = reg.find_condition("stem");
    const Complex lambda(0.33, -0.8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(osp::condition_value(*stem, kPoiseuille, lambda));
    }
}
BENCHMARK(BM_ConditionValue);

void BM_TraceStemCurve(benchmark::State& state) {
    const osp::Registry reg = osp::parse_registry(osp::default_registry_text());
    const osp::CurveCondition* stem = reg.find_condition("stem");
    osp::TraceOptions opts;
    opts.max_points = 200;
    opts.domain = osp::Rect{0.0, 1.0, -1.5, -0.1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            osp::trace_curve(*stem, kPoiseuille, Complex(1.0 / 3.0, -0.8), opts));
    }
}
BENCHMARK(BM_TraceStemCurve)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
