#include "fbmloss/path_stats.hpp"
#include "fbmloss/samplers.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using fbm::GaussianSource;
using fbm::HurstParameter;
using fbm::SamplerMethod;
using fbm::SeedSpec;
using fbm::TimeGrid;

void sample_paths(benchmark::State& state, SamplerMethod method) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const TimeGrid grid(1.0, n);
    const auto sampler = fbm::make_sampler(method, HurstParameter(0.7), grid);
    std::vector<double> values(grid.size());
    std::uint64_t i = 0;
    for (auto _ : state) {
        GaussianSource src(SeedSpec{1, i++});
        sampler->sample_into(values, src);
        benchmark::DoNotOptimize(values.data());
    }
    state.SetItemsProcessed(state.iterations());
}

void BM_Cholesky(benchmark::State& s) { sample_paths(s, SamplerMethod::cholesky); }
void BM_Hosking(benchmark::State& s) { sample_paths(s, SamplerMethod::hosking); }
void BM_Circulant(benchmark::State& s) { sample_paths(s, SamplerMethod::circulant); }
void BM_TruncatedMa(benchmark::State& s) { sample_paths(s, SamplerMethod::truncated_ma); }

void BM_Setup(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto method = static_cast<SamplerMethod>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fbm::make_sampler(method, HurstParameter(0.7), TimeGrid(1.0, n)));
    }
}

void BM_MaxLoss(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> values(n + 1, 0.0);
    GaussianSource src(SeedSpec{2, 0});
    for (std::size_t i = 1; i <= n; ++i) {
        values[i] = values[i - 1] + src.next();
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(fbm::max_loss(values));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void BM_Gaussian(benchmark::State& state) {
    std::vector<double> out(1024);
    GaussianSource src(SeedSpec{3, 0});
    for (auto _ : state) {
        src.fill(out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * 1024);
}

} // namespace

BENCHMARK(BM_Cholesky)->RangeMultiplier(4)->Range(64, 1024);
BENCHMARK(BM_Hosking)->RangeMultiplier(4)->Range(64, 1024);
BENCHMARK(BM_Circulant)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_TruncatedMa)->Arg(256);
BENCHMARK(BM_Setup)
    ->Args({1024, static_cast<int>(SamplerMethod::cholesky)})
    ->Args({1024, static_cast<int>(SamplerMethod::hosking)})
    ->Args({1024, static_cast<int>(SamplerMethod::circulant)})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MaxLoss)->Arg(1024)->Arg(65536);
BENCHMARK(BM_Gaussian);

BENCHMARK_MAIN();
