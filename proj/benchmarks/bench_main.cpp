#include <benchmark/benchmark.h>

#include "spider/closed_forms.hpp"
#include "spider/rng.hpp"
#include "spider/spider_sim.hpp"

namespace {

using namespace spider;

void BM_RadialStep(benchmark::State& state) {
    RngStream rng(7);
    double b = 0.3;
    for (auto _ : state) {
        const ReflectedStep s = signed_step_with_local_time(b, 1.0 / 64.0, 0.0, rng);
        b = s.value;
        benchmark::DoNotOptimize(b);
    }
}
BENCHMARK(BM_RadialStep);

void BM_SimulateSpider(benchmark::State& state) {
    const RaySpace rays({0.3, 0.7});
    const auto steps = static_cast<std::size_t>(state.range(0));
    std::uint64_t p = 0;
    for (auto _ : state) {
        RngStream rng = RngStream::substream(11, streams::kSimulate, p++);
        SpiderPath path = simulate_spider(rays, SpiderPoint{}, 1.0, steps, rng);
        benchmark::DoNotOptimize(path.x.back());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateSpider)->Arg(64)->Arg(512)->Arg(4096);

void BM_PostHitMoment(benchmark::State& state) {
    double t = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(post_hit_moment(-1.0, -2.0, 0.5, t).value);
        t = t < 100.0 ? t + 1.0 : 1.0;
    }
}
BENCHMARK(BM_PostHitMoment);

void BM_WeightEnvelope(benchmark::State& state) {
    const RaySpace rays({0.3, 0.7});
    const PenaltyParams params{{-0.5, 0.4}, 0.2};
    for (auto _ : state)
        benchmark::DoNotOptimize(weight_envelope(rays, params, 0.7, 0, 50.0).value);
}
BENCHMARK(BM_WeightEnvelope);

}  // namespace

BENCHMARK_MAIN();
