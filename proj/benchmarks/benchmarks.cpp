// Micro-benchmarks for the hot paths: spectral decomposition, partial
// dephasing application, induced norms, the full bound report, and the Choi
// construction.

#include "fuzzproc/ensemble.hpp"
#include "fuzzproc/equilibration_bounds.hpp"
#include "fuzzproc/process_tensor.hpp"
#include "fuzzproc/rng.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace fuzzproc;

SpectralDecomposition makeSpec(int d, std::uint64_t seed) {
    auto rng = makeRng(seed);
    return spectralDecompose(randomHermitian(d, rng));
}

void BM_SpectralDecompose(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    auto rng = makeRng(7);
    const Matrix H = randomHermitian(d, rng);
    for (auto _ : state) benchmark::DoNotOptimize(spectralDecompose(H));
}
BENCHMARK(BM_SpectralDecompose)->Arg(8)->Arg(16)->Arg(32);

void BM_PartialDephasingApply(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const auto spec = makeSpec(d, 11);
    WaitingTimeDistribution dist{DistributionFamily::UniformWindow, 1.0, 10.0};
    const auto map = buildPartialDephasing(spec, dist);
    auto rng = makeRng(12);
    const Matrix X = randomDensityMatrix(d, d, rng);
    for (auto _ : state) benchmark::DoNotOptimize(map.apply(X));
}
BENCHMARK(BM_PartialDephasingApply)->Arg(8)->Arg(16)->Arg(32);

void BM_InducedNormMatrixFree(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const auto spec = makeSpec(d, 21);
    WaitingTimeDistribution dist{DistributionFamily::UniformWindow, 1.0, 25.0};
    const auto g = buildPartialDephasing(spec, dist);
    const auto dep = buildDephasing(spec);
    auto apply = [&](const Matrix& X) { return g.apply(X) - dep.apply(X); };
    auto applyAdj = [&](const Matrix& X) {
        return g.applyAdjoint(X) - dep.applyAdjoint(X);
    };
    for (auto _ : state) benchmark::DoNotOptimize(inducedNorm(d, apply, applyAdj));
}
BENCHMARK(BM_InducedNormMatrixFree)->Arg(8)->Arg(16);

void BM_MultiTimeBound(benchmark::State& state) {
    EnsembleParams params;
    params.dimE = 4;
    params.k = static_cast<int>(state.range(0));
    const ProcessSpec spec = randomProcessSpec(params, 31);
    for (auto _ : state) benchmark::DoNotOptimize(multiTimeBound(spec));
}
BENCHMARK(BM_MultiTimeBound)->Arg(1)->Arg(2);

void BM_BuildChoi(benchmark::State& state) {
    EnsembleParams params;
    params.k = static_cast<int>(state.range(0));
    const ProcessSpec spec = randomProcessSpec(params, 41);
    std::vector<double> times(params.k + 1, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(buildChoi(spec, EvolutionMode::FixedTimes, times));
}
BENCHMARK(BM_BuildChoi)->Arg(1)->Arg(2);

}  // namespace

BENCHMARK_MAIN();
