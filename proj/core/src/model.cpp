#include "wavesq/model.hpp"

#include "wavesq/errors.hpp"
#include "wavesq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wavesq {

namespace {

double blip_eval(double x) {
    if (x <= 0.8)
        return 0.32 + 0.6 * x + 0.3 * std::exp(-100.0 * (x - 0.3) * (x - 0.3));
    return -0.28 + 0.6 * x + 0.3 * std::exp(-100.0 * (x - 1.3) * (x - 1.3));
}

double ramp_eval(double x) { return x - (x >= 0.37 ? 1.0 : 0.0) + 0.70; }

double parabolas_eval(double x) {
    double p;
    if (x <= 0.5)
        p = 4.0 * x * x * (3.0 - 4.0 * x);
    else if (x <= 0.75)
        p = (4.0 / 3.0) * x * (4.0 * x * x - 10.0 * x + 7.0) - 1.5;
    else
        p = (16.0 / 3.0) * x * (1.0 - x) * (1.0 - x);
    return p + 0.05;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

} // namespace

TestFunction test_function(const std::string& name) {
    if (name == "blip") return {"blip", blip_eval, 0.0};
    if (name == "ramp") return {"ramp", ramp_eval, 0.0};
    if (name == "parabolas") return {"parabolas", parabolas_eval, 0.05};
    throw validation_error("unknown test function '" + name +
                           "' (catalog: parabolas, ramp, blip)");
}

void validate_model_config(const ModelConfig& config) {
    if (!config.r.evaluator)
        throw validation_error("model config has no target function");
    if (!is_power_of_two(config.n))
        throw validation_error("sample size must be a power of two, got " +
                               std::to_string(config.n));
    if (config.n < (std::size_t{1} << 8) || config.n > (std::size_t{1} << 20))
        throw validation_error("sample size outside 2^8..2^20, got " +
                               std::to_string(config.n));
    if (config.sigma2 < 0.0)
        throw validation_error("sigma2 must be nonnegative");
    if (config.noise_mode == NoiseMode::a6 && !config.g)
        throw validation_error("noise mode a6 requires a known g");
}

DesignSample generate_sample(const ModelConfig& config) {
    validate_model_config(config);
    const std::size_t n = config.n;
    rng gen(config.seed);

    // fixed draw layout: n uniforms for X, then the U block, then the V block
    std::vector<double> x(n), u(n), v(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = gen.next_uniform01();
    switch (config.u_law) {
    case ULaw::uniform_pm1: {
        const double scale = config.u_standardize ? std::sqrt(3.0) : 1.0;
        for (std::size_t i = 0; i < n; ++i)
            u[i] = scale * gen.next_uniform(-1.0, 1.0);
        break;
    }
    case ULaw::gaussian: // already E[U^2]=1; u_standardize is a no-op
        for (std::size_t i = 0; i < n; ++i) u[i] = gen.next_normal();
        break;
    case ULaw::constant_one:
        for (std::size_t i = 0; i < n; ++i) u[i] = 1.0;
        break;
    }
    if (config.noise_mode == NoiseMode::a5) {
        const double sd = std::sqrt(config.sigma2);
        for (std::size_t i = 0; i < n; ++i) v[i] = sd * gen.next_normal();
    }

    // deterministic tie-break before sorting; clamp so the jitter cannot push
    // a draw to 1.0 (all consumers require X in [0,1))
    for (std::size_t i = 0; i < n; ++i)
        x[i] = std::min(x[i] + 1e-15 * static_cast<double>(i),
                        0x1.fffffffffffffp-1);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&x](std::size_t a, std::size_t b) { return x[a] < x[b]; });

    DesignSample sample;
    sample.config = config;
    sample.x.resize(n);
    sample.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = order[i];
        const double xi = x[src];
        const double vi =
            (config.noise_mode == NoiseMode::a5) ? v[src] : config.g(xi);
        sample.x[i] = xi;
        sample.y[i] = std::sqrt(config.r(xi)) * u[src] + vi;
    }
    return sample;
}

} // namespace wavesq
