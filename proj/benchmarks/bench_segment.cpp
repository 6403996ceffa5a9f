#include "uscut/max_flow.hpp"
#include "uscut/metrics.hpp"
#include "uscut/phantom.hpp"
#include "uscut/segment.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

uscut::Phantom phantom_512()
{
    uscut::PhantomSpec spec;
    spec.width = 512;
    spec.height = 512;
    spec.cx = 256;
    spec.cy = 256;
    spec.radius = 60;
    return uscut::make_phantom(spec);
}

void BM_Segment512(benchmark::State& state)
{
    const auto p = phantom_512();
    for (auto _ : state) {
        auto r = uscut::segment(p.image, {256.0, 256.0}, {});
        benchmark::DoNotOptimize(r.cut_cost);
    }
}
BENCHMARK(BM_Segment512)->Unit(benchmark::kMillisecond);

void BM_MinCutGrid(benchmark::State& state)
{
    const int side = static_cast<int>(state.range(0));
    const int n = side * side;
    uscut::graph::FlowGraph g(n + 2, n, n + 1);
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> cap(0, 9);
    for (int i = 0; i < n; ++i) {
        g.add_edge(n, i, cap(rng));
        g.add_edge(i, n + 1, cap(rng));
        if (i % side + 1 < side) {
            g.add_edge(i, i + 1, cap(rng));
            g.add_edge(i + 1, i, cap(rng));
        }
        if (i + side < n) {
            g.add_edge(i, i + side, cap(rng));
            g.add_edge(i + side, i, cap(rng));
        }
    }
    for (auto _ : state) {
        auto cut = uscut::graph::min_st_cut(g);
        benchmark::DoNotOptimize(cut.flow_value);
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_MinCutGrid)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Hausdorff(benchmark::State& state)
{
    const auto p = phantom_512();
    const auto r = uscut::segment(p.image, {256.0, 256.0}, {});
    for (auto _ : state) {
        benchmark::DoNotOptimize(uscut::metrics::hausdorff(r.mask, p.truth));
    }
}
BENCHMARK(BM_Hausdorff)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
