#include "wavesq/rng.hpp"
#include "wavesq/wavelet.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace wavesq;

namespace {

std::vector<double> random_signal(std::size_t n) {
    rng gen(42);
    std::vector<double> x(n);
    for (double& v : x) v = gen.next_uniform(-1.0, 1.0);
    return x;
}

} // namespace

static void bm_dwt(benchmark::State& state) {
    const WaveletFilter filter = make_daubechies_filter(8);
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const std::vector<double> signal = random_signal(n);
    for (auto _ : state) {
        CoefficientPyramid res = dwt_periodic(signal, 0, filter);
        benchmark::DoNotOptimize(res.approx.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}
BENCHMARK(bm_dwt)->Arg(1024)->Arg(4096)->Arg(16384)->Unit(benchmark::kMicrosecond);

static void bm_idwt(benchmark::State& state) {
    const WaveletFilter filter = make_daubechies_filter(8);
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const CoefficientPyramid coeffs = dwt_periodic(random_signal(n), 0, filter);
    for (auto _ : state) {
        std::vector<double> back = idwt_periodic(coeffs, filter);
        benchmark::DoNotOptimize(back.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}
BENCHMARK(bm_idwt)->Arg(1024)->Arg(4096)->Arg(16384)->Unit(benchmark::kMicrosecond);

static void bm_cascade(benchmark::State& state) {
    const WaveletFilter filter = make_daubechies_filter(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        ScalingTable table = cascade_scaling_table(filter, 10);
        benchmark::DoNotOptimize(table.values_phi.data());
    }
}
BENCHMARK(bm_cascade)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

static void bm_basis_eval(benchmark::State& state) {
    const ScalingTable table =
        cascade_scaling_table(make_daubechies_filter(8), 12);
    rng gen(7);
    std::vector<double> points(4096);
    for (double& p : points) p = gen.next_uniform01();
    for (auto _ : state) {
        double acc = 0.0;
        for (double p : points)
            acc += eval_basis_periodized(table, BasisKind::psi, 4, 3, p);
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(bm_basis_eval)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
