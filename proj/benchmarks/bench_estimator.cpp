#include "wavesq/estimator.hpp"
#include "wavesq/model.hpp"
#include "wavesq/selection.hpp"
#include "wavesq/wavelet.hpp"

#include <benchmark/benchmark.h>

using namespace wavesq;

namespace {

const ScalingTable& shared_table() {
    static const ScalingTable table =
        cascade_scaling_table(make_daubechies_filter(8), 12);
    return table;
}

DesignSample blip_sample(std::size_t n) {
    ModelConfig mc;
    mc.r = test_function("blip");
    mc.n = n;
    mc.sigma2 = 0.01;
    mc.seed = 7;
    return generate_sample(mc);
}

} // namespace

static void bm_pyramid_coefficients(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const DesignSample sample = blip_sample(n);
    EstimatorConfig cfg;
    cfg.j_star = 4;
    for (auto _ : state) {
        CoefficientSet coeffs = pyramid_coefficients(sample, cfg, shared_table());
        benchmark::DoNotOptimize(coeffs.alpha_hat.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}
BENCHMARK(bm_pyramid_coefficients)->Arg(1024)->Arg(4096)->Unit(benchmark::kMicrosecond);

static void bm_alpha_hat_direct(benchmark::State& state) {
    const DesignSample sample = blip_sample(1024);
    EstimatorConfig cfg;
    cfg.j_star = 4;
    for (auto _ : state) {
        double a = alpha_hat_direct(sample, 4, 9, cfg, shared_table());
        benchmark::DoNotOptimize(a);
    }
}
BENCHMARK(bm_alpha_hat_direct)->Unit(benchmark::kMicrosecond);

static void bm_linear_estimate(benchmark::State& state) {
    const DesignSample sample = blip_sample(4096);
    EstimatorConfig cfg;
    cfg.j_star = 4;
    const CoefficientSet coeffs = pyramid_coefficients(sample, cfg, shared_table());
    const WaveletFilter filter = make_daubechies_filter(8);
    for (auto _ : state) {
        Estimate est = linear_estimate(coeffs, filter);
        benchmark::DoNotOptimize(est.values.data());
    }
}
BENCHMARK(bm_linear_estimate)->Unit(benchmark::kMicrosecond);

static void bm_select_jstar(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const DesignSample sample = blip_sample(n);
    const EstimatorConfig cfg;
    for (auto _ : state) {
        SelectionResult sel = select_jstar(sample, cfg, shared_table());
        benchmark::DoNotOptimize(sel.chosen_jstar);
    }
}
BENCHMARK(bm_select_jstar)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

static void bm_select_threshold(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const DesignSample sample = blip_sample(n);
    const EstimatorConfig cfg;
    for (auto _ : state) {
        SelectionResult sel = select_threshold(sample, 4, cfg, shared_table());
        benchmark::DoNotOptimize(sel.chosen_threshold);
    }
}
BENCHMARK(bm_select_threshold)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
