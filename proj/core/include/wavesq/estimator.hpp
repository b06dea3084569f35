#pragma once

#include "wavesq/model.hpp"
#include "wavesq/wavelet.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <vector>

namespace wavesq {

// Additive-noise knowledge the corrections are built from: under a5 the
// variance of V, under a6 the known function g squared (kept as g^2 because
// every correction integrates g^2 against a basis function).
struct NoiseModel {
    NoiseMode kind = NoiseMode::a5;
    double sigma2 = 0.0;
    std::function<double(double)> g_squared;
};

NoiseModel noise_a5(double sigma2);
NoiseModel noise_a6(std::function<double(double)> g);
// direct g^2 injection (test hook; g^2 may then be signed)
NoiseModel noise_a6_squared(std::function<double(double)> g_squared);

enum class Backend { direct, pyramid };

struct EstimatorConfig {
    int j_star = 4;
    int j1 = -1; // -1: use the finest level log2(n)-1
    double kappa = 1.0;
    NoiseModel noise = noise_a5(0.01);
    Backend backend = Backend::pyramid;
    bool beta_truncation = false; // per-term clipping at rho_n
    int filter_order = 8;         // vanishing moments of the Daubechies filter
    int cascade_depth = 12;
};

double rho_n(std::size_t n); // sqrt(n / ln n)
double t_n(std::size_t n);   // sqrt(ln n / n) = 1/rho_n
double universal_threshold(std::size_t n, double kappa);
int default_j1(std::size_t n); // log2(n) - 1

// Throws validation_error unless 0 <= j_star <= j1 <= log2(n)-1 (after the
// j1 default is resolved), kappa > 0 and the noise model is complete.
void validate_estimator_config(const EstimatorConfig& config, std::size_t n);

// Periodic trapezoid integral of f * basis_{j,k} on a uniform grid
// (the quadrature behind true coefficients and the a6 corrections).
double quadrature_coefficient(const std::function<double(double)>& f,
                              const ScalingTable& table, BasisKind kind, int j,
                              int k, std::size_t points = std::size_t{1} << 14);

// Corrections subtracted from the raw empirical sums: v removes the additive
// noise from approximation coefficients (a5: sigma2 * 2^{-j/2}; a6: integral
// of g^2 * Phi_{j,k}), w the same for detail coefficients (a5: 0; a6:
// integral of g^2 * Psi_{j,k}).
double correction_v(int j, int k, const NoiseModel& noise,
                    const ScalingTable& table);
double correction_w(int j, int k, const NoiseModel& noise,
                    const ScalingTable& table);

// Direct-projection estimators:
//   alpha_hat = (1/n) sum_i Y_i^2 Phi_{j,k}(X_i) - v_{j,k}
//   beta_hat  = (1/n) sum_i K_i 1{|K_i| <= rho_n},
//               K_i = Y_i^2 Psi_{j,k}(X_i) - w_{j,k}
// (the indicator is dropped when config.beta_truncation is false).
double alpha_hat_direct(const DesignSample& sample, int j, int k,
                        const EstimatorConfig& config,
                        const ScalingTable& table);
double beta_hat_direct(const DesignSample& sample, int j, int k,
                       const EstimatorConfig& config,
                       const ScalingTable& table);

// Bias-corrected empirical coefficients for levels j_star..j1.
struct CoefficientSet {
    std::size_t n = 0; // sample size the set was estimated from
    int j_star = 0;
    int j1 = 0;
    std::vector<double> alpha_hat;             // 2^{j_star} values
    std::map<int, std::vector<double>> beta_hat; // level -> 2^level values
    // corrections that were subtracted, for inspection/dumping
    std::vector<double> corrections_v;
    std::map<int, std::vector<double>> corrections_w;
};

// Fast backend: Mallat pyramid on s_i = Y^2_{(i)} / sqrt(n) (the X-order
// statistics carry Y along), corrections subtracted per coefficient. With
// beta_truncation, inputs with Y^2 > rho_n are zeroed before the transform
// (the per-term indicator has no pyramid equivalent).
CoefficientSet pyramid_coefficients(const DesignSample& sample,
                                    const EstimatorConfig& config,
                                    const ScalingTable& table);

// Reference backend: alpha_hat_direct / beta_hat_direct at every (j,k).
CoefficientSet direct_coefficients(const DesignSample& sample,
                                   const EstimatorConfig& config,
                                   const ScalingTable& table);

// Dispatch on config.backend.
CoefficientSet compute_coefficients(const DesignSample& sample,
                                    const EstimatorConfig& config,
                                    const ScalingTable& table);

// A reconstruction of r on the dyadic grid i/n, i = 0..n-1.
struct Estimate {
    std::vector<double> grid;
    std::vector<double> values;
    CoefficientSet coefficients;
};

// Projection estimator: approximation coefficients only, details zeroed.
Estimate linear_estimate(const CoefficientSet& coeffs,
                         const WaveletFilter& filter);

// Hard thresholding: keep beta_hat with |beta_hat| >= threshold for levels
// j_star..j1, reconstruct as in linear_estimate plus the kept details.
Estimate nonlinear_estimate(const CoefficientSet& coeffs,
                            const WaveletFilter& filter, double threshold);

std::size_t count_kept_details(const CoefficientSet& coeffs, double threshold);

// Piecewise-linear interpolation of the grid values (periodic wrap on the
// last cell, consistent with the periodized basis). Points must lie in [0,1).
std::vector<double> evaluate_estimate(const Estimate& estimate,
                                      const std::vector<double>& points);

// CSV rows: level, index, value, kind (alpha|beta), kept (0|1 under the given
// threshold; alpha rows are always kept).
void dump_coefficients_csv(const CoefficientSet& coeffs, double threshold,
                           std::ostream& out);

} // namespace wavesq
