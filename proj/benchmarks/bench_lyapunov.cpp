#include <benchmark/benchmark.h>

#include "fallball/lyapunov.hpp"

using namespace fallball;

namespace {

void BM_estimate_spectrum(benchmark::State& state) {
    MassProfile mp({3.0, 2.0, 1.0});
    const PhaseState initial = sample_state(mp, 1.0, 2024);

    SpectrumOptions opts;
    opts.n_returns = state.range(0);
    opts.qr_stride = static_cast<int>(state.range(1));
    opts.seed = 7;

    for (auto _ : state) {
        LyapunovEstimate est = estimate_spectrum(mp, initial, opts);
        benchmark::DoNotOptimize(est.map_exponents.data());
    }
    state.counters["returns/s"] = benchmark::Counter(
        static_cast<double>(state.range(0)), benchmark::Counter::kIsRate);
}

void BM_poincare_step(benchmark::State& state) {
    MassProfile mp({3.0, 2.0, 1.0});
    const PhaseState initial = sample_state(mp, 1.0, 11);
    SectionPoint sp = first_section_point(mp, initial);
    for (auto _ : state) {
        PoincareStep step = poincare_step(mp, sp);
        sp = step.point;
        benchmark::DoNotOptimize(sp.state.q.data());
    }
}

}  // namespace

BENCHMARK(BM_estimate_spectrum)->Args({2000, 1})->Args({2000, 5})->Args({2000, 20});
BENCHMARK(BM_poincare_step);
