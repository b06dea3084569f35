#include "wavesq/estimator.hpp"

#include "wavesq/errors.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>

namespace wavesq {

namespace {

int log2_exact(std::size_t n) {
    int j = 0;
    while ((std::size_t{1} << j) < n) ++j;
    return j;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

} // namespace

NoiseModel noise_a5(double sigma2) {
    NoiseModel m;
    m.kind = NoiseMode::a5;
    m.sigma2 = sigma2;
    return m;
}

NoiseModel noise_a6(std::function<double(double)> g) {
    NoiseModel m;
    m.kind = NoiseMode::a6;
    m.g_squared = [g = std::move(g)](double x) {
        const double v = g(x);
        return v * v;
    };
    return m;
}

NoiseModel noise_a6_squared(std::function<double(double)> g_squared) {
    NoiseModel m;
    m.kind = NoiseMode::a6;
    m.g_squared = std::move(g_squared);
    return m;
}

double rho_n(std::size_t n) {
    return std::sqrt(static_cast<double>(n) / std::log(static_cast<double>(n)));
}

double t_n(std::size_t n) {
    return std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(n));
}

double universal_threshold(std::size_t n, double kappa) {
    return kappa * t_n(n);
}

int default_j1(std::size_t n) { return log2_exact(n) - 1; }

void validate_estimator_config(const EstimatorConfig& config, std::size_t n) {
    if (!is_power_of_two(n))
        throw validation_error("sample size must be a power of two, got " +
                               std::to_string(n));
    const int j_max = log2_exact(n) - 1;
    const int j1 = config.j1 < 0 ? j_max : config.j1;
    if (config.j_star < 0 || config.j_star > j1 || j1 > j_max)
        throw validation_error(
            "level constraints violated: need 0 <= j_star <= j1 <= log2(n)-1, "
            "got j_star=" + std::to_string(config.j_star) +
            ", j1=" + std::to_string(j1) + ", log2(n)-1=" +
            std::to_string(j_max));
    if (config.kappa <= 0.0)
        throw validation_error("kappa must be positive");
    if (config.noise.kind == NoiseMode::a5 && config.noise.sigma2 < 0.0)
        throw validation_error("sigma2 must be nonnegative");
    if (config.noise.kind == NoiseMode::a6 && !config.noise.g_squared)
        throw validation_error("noise mode a6 requires a known g");
    if (config.filter_order < 1 || config.filter_order > 10)
        throw validation_error("filter order outside 1..10");
}

double quadrature_coefficient(const std::function<double(double)>& f,
                              const ScalingTable& table, BasisKind kind, int j,
                              int k, std::size_t points) {
    // periodic trapezoid = plain mean over the uniform grid t/points
    double acc = 0.0;
    const double step = 1.0 / static_cast<double>(points);
    for (std::size_t t = 0; t < points; ++t) {
        const double x = static_cast<double>(t) * step;
        acc += f(x) * eval_basis_periodized(table, kind, j, k, x);
    }
    return acc * step;
}

double correction_v(int j, int k, const NoiseModel& noise,
                    const ScalingTable& table) {
    if (noise.kind == NoiseMode::a5)
        return noise.sigma2 * std::pow(2.0, -0.5 * j);
    return quadrature_coefficient(noise.g_squared, table, BasisKind::phi, j, k);
}

double correction_w(int j, int k, const NoiseModel& noise,
                    const ScalingTable& table) {
    if (noise.kind == NoiseMode::a5) return 0.0;
    return quadrature_coefficient(noise.g_squared, table, BasisKind::psi, j, k);
}

double alpha_hat_direct(const DesignSample& sample, int j, int k,
                        const EstimatorConfig& config,
                        const ScalingTable& table) {
    const std::size_t n = sample.x.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y2 = sample.y[i] * sample.y[i];
        acc += y2 * eval_basis_periodized(table, BasisKind::phi, j, k,
                                          sample.x[i]);
    }
    return acc / static_cast<double>(n) - correction_v(j, k, config.noise, table);
}

double beta_hat_direct(const DesignSample& sample, int j, int k,
                       const EstimatorConfig& config,
                       const ScalingTable& table) {
    const std::size_t n = sample.x.size();
    const double w = correction_w(j, k, config.noise, table);
    const double clip = rho_n(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y2 = sample.y[i] * sample.y[i];
        const double term =
            y2 * eval_basis_periodized(table, BasisKind::psi, j, k,
                                       sample.x[i]) -
            w;
        if (!config.beta_truncation || std::fabs(term) <= clip) acc += term;
    }
    return acc / static_cast<double>(n);
}

CoefficientSet pyramid_coefficients(const DesignSample& sample,
                                    const EstimatorConfig& config,
                                    const ScalingTable& table) {
    const std::size_t n = sample.x.size();
    validate_estimator_config(config, n);
    const int big_j = log2_exact(n);
    const int j1 = config.j1 < 0 ? big_j - 1 : config.j1;

    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    const double clip = rho_n(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double y2 = sample.y[i] * sample.y[i];
        s[i] = (config.beta_truncation && y2 > clip) ? 0.0 : y2 * inv_sqrt_n;
    }

    const WaveletFilter filter = make_daubechies_filter(config.filter_order);
    CoefficientPyramid pyramid = dwt_periodic(s, config.j_star, filter);

    CoefficientSet set;
    set.n = n;
    set.j_star = config.j_star;
    set.j1 = j1;
    set.alpha_hat = std::move(pyramid.approx);
    set.corrections_v.resize(set.alpha_hat.size());
    for (std::size_t k = 0; k < set.alpha_hat.size(); ++k) {
        const double v =
            correction_v(config.j_star, static_cast<int>(k), config.noise,
                         table);
        set.alpha_hat[k] -= v;
        set.corrections_v[k] = v;
    }
    for (int j = config.j_star; j <= j1; ++j) {
        std::vector<double> beta = std::move(pyramid.details.at(j));
        std::vector<double> ws(beta.size());
        for (std::size_t k = 0; k < beta.size(); ++k) {
            const double w =
                correction_w(j, static_cast<int>(k), config.noise, table);
            beta[k] -= w;
            ws[k] = w;
        }
        set.beta_hat.emplace(j, std::move(beta));
        set.corrections_w.emplace(j, std::move(ws));
    }
    return set;
}

CoefficientSet direct_coefficients(const DesignSample& sample,
                                   const EstimatorConfig& config,
                                   const ScalingTable& table) {
    const std::size_t n = sample.x.size();
    validate_estimator_config(config, n);
    const int j1 = config.j1 < 0 ? default_j1(n) : config.j1;

    CoefficientSet set;
    set.n = n;
    set.j_star = config.j_star;
    set.j1 = j1;
    const std::size_t slots = std::size_t{1} << config.j_star;
    set.alpha_hat.resize(slots);
    set.corrections_v.resize(slots);
    for (std::size_t k = 0; k < slots; ++k) {
        set.alpha_hat[k] = alpha_hat_direct(sample, config.j_star,
                                            static_cast<int>(k), config, table);
        set.corrections_v[k] = correction_v(config.j_star, static_cast<int>(k),
                                            config.noise, table);
    }
    for (int j = config.j_star; j <= j1; ++j) {
        const std::size_t m = std::size_t{1} << j;
        std::vector<double> beta(m), ws(m);
        for (std::size_t k = 0; k < m; ++k) {
            beta[k] = beta_hat_direct(sample, j, static_cast<int>(k), config,
                                      table);
            ws[k] = correction_w(j, static_cast<int>(k), config.noise, table);
        }
        set.beta_hat.emplace(j, std::move(beta));
        set.corrections_w.emplace(j, std::move(ws));
    }
    return set;
}

CoefficientSet compute_coefficients(const DesignSample& sample,
                                    const EstimatorConfig& config,
                                    const ScalingTable& table) {
    return config.backend == Backend::pyramid
               ? pyramid_coefficients(sample, config, table)
               : direct_coefficients(sample, config, table);
}

namespace {

Estimate reconstruct(const CoefficientSet& coeffs, const WaveletFilter& filter,
                     double threshold, bool keep_details) {
    const std::size_t n = coeffs.n;
    const int big_j = log2_exact(n);

    CoefficientPyramid pyramid;
    pyramid.coarse_level = coeffs.j_star;
    pyramid.approx = coeffs.alpha_hat;
    for (int j = coeffs.j_star; j < big_j; ++j) {
        std::vector<double> detail(std::size_t{1} << j, 0.0);
        if (keep_details && j <= coeffs.j1) {
            const auto it = coeffs.beta_hat.find(j);
            if (it != coeffs.beta_hat.end()) {
                for (std::size_t k = 0; k < detail.size(); ++k) {
                    const double b = it->second[k];
                    if (std::fabs(b) >= threshold) detail[k] = b;
                }
            }
        }
        pyramid.details.emplace(j, std::move(detail));
    }

    Estimate est;
    est.values = idwt_periodic(pyramid, filter);
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    for (double& v : est.values) v *= sqrt_n; // undo the Y^2/sqrt(n) scaling
    est.grid.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        est.grid[i] = static_cast<double>(i) / static_cast<double>(n);
    est.coefficients = coeffs;
    return est;
}

} // namespace

Estimate linear_estimate(const CoefficientSet& coeffs,
                         const WaveletFilter& filter) {
    return reconstruct(coeffs, filter, 0.0, false);
}

Estimate nonlinear_estimate(const CoefficientSet& coeffs,
                            const WaveletFilter& filter, double threshold) {
    if (threshold < 0.0 || std::isnan(threshold))
        throw validation_error("threshold must be >= 0");
    return reconstruct(coeffs, filter, threshold, true);
}

std::size_t count_kept_details(const CoefficientSet& coeffs, double threshold) {
    std::size_t kept = 0;
    for (const auto& [j, beta] : coeffs.beta_hat)
        for (double b : beta)
            if (std::fabs(b) >= threshold) ++kept;
    return kept;
}

std::vector<double> evaluate_estimate(const Estimate& estimate,
                                      const std::vector<double>& points) {
    const std::size_t n = estimate.values.size();
    std::vector<double> out(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        const double x = points[p];
        if (!(x >= 0.0 && x < 1.0))
            throw validation_error("evaluation point outside [0,1)");
        const double pos = x * static_cast<double>(n);
        const std::size_t cell = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(cell);
        const double left = estimate.values[cell];
        const double right = estimate.values[(cell + 1) % n]; // periodic wrap
        out[p] = left + frac * (right - left);
    }
    return out;
}

void dump_coefficients_csv(const CoefficientSet& coeffs, double threshold,
                           std::ostream& out) {
    out << "level,index,value,kind,kept\n";
    char line[128];
    for (std::size_t k = 0; k < coeffs.alpha_hat.size(); ++k) {
        std::snprintf(line, sizeof line, "%d,%zu,%.17g,alpha,1\n",
                      coeffs.j_star, k, coeffs.alpha_hat[k]);
        out << line;
    }
    for (const auto& [j, beta] : coeffs.beta_hat) {
        for (std::size_t k = 0; k < beta.size(); ++k) {
            const int kept = std::fabs(beta[k]) >= threshold ? 1 : 0;
            std::snprintf(line, sizeof line, "%d,%zu,%.17g,beta,%d\n", j, k,
                          beta[k], kept);
            out << line;
        }
    }
}

} // namespace wavesq
