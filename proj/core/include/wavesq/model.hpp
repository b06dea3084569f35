#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace wavesq {

// One of the catalog targets for the squared regression function r.
// evaluator is total on [0,1]; positivity_shift is the constant already baked
// into evaluator so that min r >= 0.05 (making f = sqrt(r) well defined).
struct TestFunction {
    std::string name;
    std::function<double(double)> evaluator;
    double positivity_shift = 0.0;

    double operator()(double x) const { return evaluator(x); }
};

// Catalog lookup by name: "parabolas", "ramp" or "blip".
TestFunction test_function(const std::string& name);

// Law of the multiplicative noise U. constant_one (U = 1) exists for
// noiseless sanity runs where Y^2 must equal r(X) exactly.
enum class ULaw { uniform_pm1, gaussian, constant_one };

enum class NoiseMode { a5, a6 }; // V ~ N(0, sigma2) vs V = g(X), g known

struct ModelConfig {
    TestFunction r;
    std::size_t n = 0;       // power of two, 2^8..2^20
    double sigma2 = 0.01;    // Var(V) under a5
    ULaw u_law = ULaw::uniform_pm1;
    bool u_standardize = true; // rescale U so E[U^2]=1 (uniform: factor sqrt(3))
    NoiseMode noise_mode = NoiseMode::a5;
    std::function<double(double)> g; // additive term under a6
    std::uint64_t seed = 0;
};

// (X_i, Y_i) pairs sorted by X, plus the generating config.
struct DesignSample {
    std::vector<double> x;
    std::vector<double> y;
    ModelConfig config;
};

void validate_model_config(const ModelConfig& config);

// Draw the sample Y_i = sqrt(r(X_i)) U_i + V_i with X_i uniform on [0,1],
// then sort pairs by X. Deterministic in config.seed: X draws first, then U,
// then V, each a fixed number of generator calls; a 1e-15*i jitter is added
// to X_i before sorting so ties are broken deterministically.
DesignSample generate_sample(const ModelConfig& config);

} // namespace wavesq
