#include <benchmark/benchmark.h>

#include "gil/datasets.hpp"
#include "gil/hyperbolicity.hpp"

using namespace gil;
using namespace gil::graphcore;

static void BM_DeltaExact(benchmark::State& state) {
    TreeOptions opt;
    opt.branching = 2;
    opt.depth = static_cast<int>(state.range(0));
    Graph g = generate_tree_dataset(opt);
    for (auto _ : state) {
        auto hist = hyperbolicity_distribution_exact(g);
        benchmark::DoNotOptimize(hist.samples);
    }
    state.SetLabel(std::to_string(g.n) + " nodes");
}
BENCHMARK(BM_DeltaExact)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_DeltaSampled(benchmark::State& state) {
    TreeOptions opt;
    opt.branching = 3;
    opt.depth = 6;  // 1093 nodes
    Graph g = generate_tree_dataset(opt);
    const auto samples = static_cast<std::int64_t>(state.range(0));
    for (auto _ : state) {
        auto hist = hyperbolicity_distribution_sampled(g, samples, 9);
        benchmark::DoNotOptimize(hist.samples);
    }
    state.SetItemsProcessed(state.iterations() * samples);
}
BENCHMARK(BM_DeltaSampled)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_BfsDistances(benchmark::State& state) {
    TreeOptions opt;
    opt.branching = 3;
    opt.depth = static_cast<int>(state.range(0));
    Graph g = generate_tree_dataset(opt);
    int src = 0;
    for (auto _ : state) {
        auto d = bfs_distances(g, src % g.n);
        benchmark::DoNotOptimize(d.data());
        ++src;
    }
}
BENCHMARK(BM_BfsDistances)->Arg(5)->Arg(7);
