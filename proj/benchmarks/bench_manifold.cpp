#include <benchmark/benchmark.h>

#include "gil/manifold.hpp"
#include "gil/rng.hpp"

using namespace gil;
using namespace gil::manifold;

namespace {

std::vector<BallPoint> sample_points(int count, int dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<BallPoint> pts;
    pts.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        std::vector<double> v(static_cast<size_t>(dim));
        double n = 0.0;
        for (auto& x : v) {
            x = rng.normal(0.0, 1.0);
            n += x * x;
        }
        const double target = rng.uniform(0.05, 0.9) / std::sqrt(n);
        for (auto& x : v) x *= target;
        pts.push_back(BallPoint{std::move(v), Curvature(1.0)});
    }
    return pts;
}

}  // namespace

static void BM_MobiusAdd(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    auto pts = sample_points(256, dim, 1);
    size_t i = 0;
    for (auto _ : state) {
        auto out = mobius_add(pts[i % 256], pts[(i + 1) % 256]);
        benchmark::DoNotOptimize(out);
        ++i;
    }
}
BENCHMARK(BM_MobiusAdd)->Arg(8)->Arg(16)->Arg(64);

static void BM_MobiusMatvec(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    auto pts = sample_points(64, dim, 2);
    Rng rng(3);
    Tensor m = rng.normal_tensor(dim, dim, 0.0, 1.0);
    size_t i = 0;
    for (auto _ : state) {
        auto out = mobius_matvec(m, pts[i % 64]);
        benchmark::DoNotOptimize(out);
        ++i;
    }
}
BENCHMARK(BM_MobiusMatvec)->Arg(8)->Arg(16)->Arg(64);

static void BM_ExpLogRoundTrip(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    auto pts = sample_points(128, dim, 4);
    Rng rng(5);
    std::vector<double> v(static_cast<size_t>(dim));
    for (auto& x : v) x = rng.uniform(-0.3, 0.3);
    size_t i = 0;
    for (auto _ : state) {
        const auto& x = pts[i % 128];
        auto y = exp_map(x, TangentVector{v, x});
        auto back = log_map(x, y);
        benchmark::DoNotOptimize(back);
        ++i;
    }
}
BENCHMARK(BM_ExpLogRoundTrip)->Arg(8)->Arg(16);

static void BM_Distance(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    auto pts = sample_points(256, dim, 6);
    size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(distance(pts[i % 256], pts[(i + 3) % 256]));
        ++i;
    }
}
BENCHMARK(BM_Distance)->Arg(8)->Arg(16)->Arg(64);
