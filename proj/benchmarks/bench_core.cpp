#include <benchmark/benchmark.h>

#include <vector>

#include "fpiv/factorial.hpp"
#include "fpiv/multidiff.hpp"
#include "fpiv/panel.hpp"
#include "fpiv/rng.hpp"
#include "fpiv/simulation.hpp"

namespace {

using namespace fpiv;

struct DeltaInputs {
    std::vector<double> values;
    std::vector<std::uint8_t> patterns;
    std::vector<double> props;
};

DeltaInputs make_delta_inputs(int n, int width) {
    CounterRng rng = CounterRng::keyed(1, 2);
    DeltaInputs in;
    in.values.resize(n);
    in.props.resize(n);
    in.patterns.resize(static_cast<std::size_t>(n) * width);
    for (int i = 0; i < n; ++i) {
        in.values[i] = rng.normal();
        in.props[i] = 0.1 + 0.8 * rng.uniform();
        for (int j = 0; j < width; ++j) in.patterns[i * width + j] = rng.bernoulli(0.5);
    }
    return in;
}

void BM_delta_ht(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto in = make_delta_inputs(n, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(delta_ht(in.values, in.patterns, 2, in.props));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_delta_ht)->Range(1000, 100000);

void BM_joint_effect(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto [ds, pop] = gen_factorial_dgp(7, n);
    SequenceSpec spec;
    spec.hi_index = 1;
    spec.lag = 1;
    spec.pattern_d = {1, 1};
    spec.pattern_dtilde = Pattern{0, 0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_joint_effect(ds, spec, 0.05));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_joint_effect)->Range(1000, 100000);

void BM_lag1_effect(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    PanelDgpConfig cfg;
    cfg.delta_feedback = 0.4;
    cfg.outcome_adapt = 0.14;
    cfg.assign_persist = 0.15;
    auto [ds, pop] = gen_panel_dgp(7, n, 2, cfg);
    SequenceSpec spec;
    spec.hi_index = 1;
    spec.lag = 1;
    spec.pattern_d = {1, 1};
    spec.pattern_dtilde = Pattern{0, 0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_lagp_effect(ds, spec, 0.05));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_lag1_effect)->Range(1000, 100000);

void BM_factorial_replicate(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::uint64_t rep = 0;
    for (auto _ : state) {
        CounterRng rng = CounterRng::keyed(11, ++rep);
        const auto pop = draw_factorial_population(rng, n, {});
        const auto ds = assign_factorial(pop, rng, {});
        benchmark::DoNotOptimize(estimate_factor_effect(ds, 0, 0.05));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_factorial_replicate)->Arg(1000);

void BM_monte_carlo_factorial(benchmark::State& state) {
    SimConfig cfg;
    cfg.profile = Profile::factorial;
    cfg.n_units = 1000;
    cfg.n_reps = static_cast<int>(state.range(0));
    cfg.seed = 3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(monte_carlo(cfg));
    }
    state.SetItemsProcessed(state.iterations() * cfg.n_reps);
}
BENCHMARK(BM_monte_carlo_factorial)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
