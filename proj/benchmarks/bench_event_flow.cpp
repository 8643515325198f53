#include <benchmark/benchmark.h>

#include "fallball/event_flow.hpp"
#include "fallball/phase_state.hpp"

using namespace fallball;

namespace {

std::vector<double> masses_for(int n) {
    std::vector<double> m(n);
    for (int i = 0; i < n; ++i) m[i] = static_cast<double>(n - i);
    return m;
}

void BM_advance_events(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    MassProfile mp(masses_for(n));
    const PhaseState initial = sample_state(mp, 1.0, 12345);

    AdvanceBudget budget;
    budget.max_events = 2000;
    AdvanceOptions opts;
    opts.record_events = false;

    std::int64_t events = 0;
    for (auto _ : state) {
        Trajectory traj = advance(mp, initial, budget, opts);
        events += traj.diagnostics.n_events;
        benchmark::DoNotOptimize(traj.final_state.q.data());
    }
    state.counters["events/s"] =
        benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}

void BM_next_event(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    MassProfile mp(masses_for(n));
    const PhaseState initial = sample_state(mp, 1.0, 999);
    for (auto _ : state) {
        EventPrediction pred = next_event(mp, initial);
        benchmark::DoNotOptimize(pred);
    }
}

}  // namespace

BENCHMARK(BM_advance_events)->Arg(2)->Arg(3)->Arg(5);
BENCHMARK(BM_next_event)->Arg(2)->Arg(3)->Arg(5)->Arg(10);
