#include <benchmark/benchmark.h>

#include "dandelion/analytics.hpp"
#include "dandelion/experiment.hpp"

using namespace dandelion;

namespace {

ExperimentConfig trial_config(EstimatorKind estimator) {
    ExperimentConfig c;
    c.n = 500;
    c.p = 0.2;
    c.q = 0.2;
    c.trials = 8;
    c.seed = 7;
    c.topology = TopologyKind::approx_4_regular;
    c.estimator = estimator;
    normalize(c);
    return c;
}

void run(benchmark::State& state, EstimatorKind estimator, ExecutionPolicy policy) {
    const auto c = trial_config(estimator);
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(c, policy));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(c.trials));
}

void BM_FirstSpySerial(benchmark::State& s) { run(s, EstimatorKind::first_spy, ExecutionPolicy::serial); }
void BM_FirstSpyParallel(benchmark::State& s) { run(s, EstimatorKind::first_spy, ExecutionPolicy::parallel); }
void BM_MatchingSerial(benchmark::State& s) { run(s, EstimatorKind::matching, ExecutionPolicy::serial); }
void BM_MatchingParallel(benchmark::State& s) { run(s, EstimatorKind::matching, ExecutionPolicy::parallel); }

void BM_WardSimulation(benchmark::State& state) {
    Rng rng = make_rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(simulate_ward_size(WardScheme::all_to_one, 0.3, 10000, rng));
}

}  // namespace

BENCHMARK(BM_FirstSpySerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FirstSpyParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MatchingSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MatchingParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WardSimulation)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
