#include <benchmark/benchmark.h>

#include "critperc/clusters.hpp"
#include "critperc/estimators.hpp"
#include "critperc/events.hpp"
#include "critperc/exact.hpp"

using namespace critperc;

static void BM_SampleConfiguration(benchmark::State& state) {
    const Region box = Region::box(static_cast<int>(state.range(0)));
    std::uint64_t stream = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sampleConfiguration(box, 0.5, {1, stream++}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(box.edges().size()));
}
BENCHMARK(BM_SampleConfiguration)->RangeMultiplier(4)->Range(8, 128);

static void BM_LabelClusters(benchmark::State& state) {
    const Region box = Region::box(static_cast<int>(state.range(0)));
    const Configuration c = sampleConfiguration(box, 0.5, {1, 0});
    for (auto _ : state) benchmark::DoNotOptimize(maxClusterSize(ClusterLabeling(c, box)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(box.size()));
}
BENCHMARK(BM_LabelClusters)->RangeMultiplier(4)->Range(8, 128);

static void BM_HorizontalCrossing(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Region box = Region::rectangle(0, n + 1, 0, n);
    const Configuration c = sampleConfiguration(box, 0.5, {2, 0});
    for (auto _ : state) benchmark::DoNotOptimize(hasHorizontalCrossing(c, box, CrossingVariant::Standard));
}
BENCHMARK(BM_HorizontalCrossing)->RangeMultiplier(4)->Range(8, 128);

static void BM_OriginRadius(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::uint64_t stream = 0;
    for (auto _ : state) benchmark::DoNotOptimize(originRadius(n, 0.5, {3, stream++}));
}
BENCHMARK(BM_OriginRadius)->RangeMultiplier(4)->Range(16, 1024);

static void BM_EventO(benchmark::State& state) {
    const int s = static_cast<int>(state.range(0));
    const PartitionSpec spec{3, s, s / 3};
    const Region W = Region::box(3 * s);
    std::uint64_t stream = 0;
    for (auto _ : state) {
        const Configuration c = sampleConfiguration(W, 0.9, {4, stream++});
        benchmark::DoNotOptimize(eventO(c, spec, W).holds);
    }
}
BENCHMARK(BM_EventO)->Arg(6)->Arg(12)->Arg(24);

static void BM_EnumerateSmallestBox(benchmark::State& state) {
    const auto task = EnumerationTask::allEdges(Region::box(1), 0.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(enumerateExpectation(task, [](const Configuration& c) {
            return static_cast<std::int64_t>(boundaryTouchCount(c, Region::box(1)));
        }));
}
BENCHMARK(BM_EnumerateSmallestBox);

static void BM_NewmanZiffSweep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::uint64_t stream = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(newmanZiffSweep(SweepObservable::HorizontalCrossing, n + 1, n, {0.5}, 1, {5, stream++}));
}
BENCHMARK(BM_NewmanZiffSweep)->Arg(16)->Arg(64);

BENCHMARK_MAIN();
