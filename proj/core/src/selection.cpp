#include "wavesq/selection.hpp"

#include "wavesq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace wavesq {

namespace {

int log2_exact(std::size_t n) {
    int j = 0;
    while ((std::size_t{1} << j) < n) ++j;
    return j;
}

// Residual target offset: the fitted curves estimate r, while the held-out
// Y^2 has mean r + E[V^2 | X], so the centering removes the additive-noise
// term from the comparison.
double centering_term(const NoiseModel& noise, double x_held) {
    return noise.kind == NoiseMode::a5 ? noise.sigma2 : noise.g_squared(x_held);
}

// Predictions at held-out design points from the fitted values on the other
// half: interleaved neighbors are averaged, edge points copy their single
// neighbor. fit_is_even says which parity the fit half came from.
std::vector<double> heldout_predictions(const std::vector<double>& fitted,
                                        bool fit_is_even) {
    const std::size_t m = fitted.size();
    std::vector<double> pred(m);
    if (fit_is_even) {
        // held-out odd point t lies between even fit points t and t+1
        for (std::size_t t = 0; t + 1 < m; ++t)
            pred[t] = 0.5 * (fitted[t] + fitted[t + 1]);
        pred[m - 1] = fitted[m - 1];
    } else {
        // held-out even point t lies between odd fit points t-1 and t
        pred[0] = fitted[0];
        for (std::size_t t = 1; t < m; ++t)
            pred[t] = 0.5 * (fitted[t - 1] + fitted[t]);
    }
    return pred;
}

void accumulate_direction(const std::vector<double>& fitted,
                          const DesignSample& held, bool fit_is_even,
                          const NoiseModel& noise, CvScore& score) {
    const std::vector<double> pred = heldout_predictions(fitted, fit_is_even);
    for (std::size_t t = 0; t < pred.size(); ++t) {
        const double y2 = held.y[t] * held.y[t];
        const double centered = y2 - pred[t] - centering_term(noise, held.x[t]);
        const double raw = y2 - pred[t];
        score.centered += centered * centered;
        score.raw += raw * raw;
    }
}

EstimatorConfig half_config(const EstimatorConfig& config, int j_star) {
    EstimatorConfig cfg = config;
    cfg.j_star = j_star;
    cfg.j1 = -1; // always the full detail range of the half sample
    cfg.backend = Backend::pyramid;
    return cfg;
}

struct Plateau {
    std::size_t first = 0;
    std::size_t extent = 0;
    std::size_t chosen = 0;
};

// Minimal plateau: the contiguous run around the (first) global minimum whose
// scores stay within 1e-12 relative of it.
Plateau find_plateau(const std::vector<double>& scores, PlateauPolicy policy) {
    std::size_t min_idx = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] < scores[min_idx]) min_idx = i;
    const double tol = 1e-12 * std::fabs(scores[min_idx]);
    std::size_t lo = min_idx, hi = min_idx;
    while (lo > 0 && scores[lo - 1] - scores[min_idx] <= tol) --lo;
    while (hi + 1 < scores.size() && scores[hi + 1] - scores[min_idx] <= tol)
        ++hi;
    Plateau p;
    p.first = lo;
    p.extent = hi - lo + 1;
    p.chosen = (policy == PlateauPolicy::first_element)
                   ? lo
                   : lo + (p.extent - 1) / 2;
    return p;
}

double rescale_factor(std::size_t n) {
    return std::sqrt(1.0 - std::log(2.0) / std::log(static_cast<double>(n)));
}

// Sorted distinct |beta_hat| values of both half fits, plus 0 and +infinity.
std::vector<double> threshold_candidates_half(const CoefficientSet& odd_fit,
                                              const CoefficientSet& even_fit) {
    std::vector<double> cand;
    cand.push_back(0.0);
    for (const CoefficientSet* set : {&odd_fit, &even_fit})
        for (const auto& [j, beta] : set->beta_hat)
            for (double b : beta) cand.push_back(std::fabs(b));
    cand.push_back(std::numeric_limits<double>::infinity());
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    return cand;
}

double design_point_mse(const Estimate& est, const TestFunction& r,
                        const std::vector<double>& xs) {
    const std::vector<double> fitted = evaluate_estimate(est, xs);
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = r(xs[i]) - fitted[i];
        acc += d * d;
    }
    return acc / static_cast<double>(xs.size());
}

} // namespace

std::pair<DesignSample, DesignSample> twofold_split(const DesignSample& sample) {
    const std::size_t n = sample.x.size();
    if (n < 4 || (n & (n - 1)) != 0)
        throw validation_error("two-fold split needs a power-of-two sample of "
                               "at least 4 points, got " + std::to_string(n));
    DesignSample odd, even;
    odd.config = sample.config;
    even.config = sample.config;
    odd.config.n = n / 2;
    even.config.n = n / 2;
    odd.x.reserve(n / 2);
    odd.y.reserve(n / 2);
    even.x.reserve(n / 2);
    even.y.reserve(n / 2);
    for (std::size_t i = 0; i < n; ++i) {
        DesignSample& half = (i % 2 == 0) ? even : odd;
        half.x.push_back(sample.x[i]);
        half.y.push_back(sample.y[i]);
    }
    return {std::move(odd), std::move(even)};
}

CvScore cv_score_linear_full(const DesignSample& sample, int j_star,
                             const EstimatorConfig& config,
                             const ScalingTable& table) {
    auto [odd, even] = twofold_split(sample);
    const EstimatorConfig cfg = half_config(config, j_star);
    const WaveletFilter filter = make_daubechies_filter(cfg.filter_order);

    CvScore score;
    const Estimate fit_even =
        linear_estimate(pyramid_coefficients(even, cfg, table), filter);
    accumulate_direction(fit_even.values, odd, true, config.noise, score);
    const Estimate fit_odd =
        linear_estimate(pyramid_coefficients(odd, cfg, table), filter);
    accumulate_direction(fit_odd.values, even, false, config.noise, score);
    return score;
}

double cv_score_linear(const DesignSample& sample, int j_star,
                       const EstimatorConfig& config,
                       const ScalingTable& table) {
    return cv_score_linear_full(sample, j_star, config, table).centered;
}

std::vector<int> jstar_candidates(std::size_t n) {
    // the half-sample pyramid caps the grid at log2(n)-2
    const int top = log2_exact(n) - 2;
    std::vector<int> grid;
    for (int j = 0; j <= top; ++j) grid.push_back(j);
    return grid;
}

SelectionResult select_jstar(const DesignSample& sample,
                             const EstimatorConfig& config,
                             const ScalingTable& table, PlateauPolicy policy) {
    const std::vector<int> grid = jstar_candidates(sample.x.size());
    SelectionResult result;
    std::vector<double> scores;
    scores.reserve(grid.size());
    for (int j : grid) {
        const double s = cv_score_linear(sample, j, config, table);
        scores.push_back(s);
        result.score_curve.emplace_back(static_cast<double>(j), s);
    }
    const Plateau p = find_plateau(scores, policy);
    result.plateau_first = p.first;
    result.plateau_extent = p.extent;
    result.chosen_index = p.chosen;
    result.chosen_jstar = grid[p.chosen];
    return result;
}

SelectionResult select_threshold(const DesignSample& sample, int j_star,
                                 const EstimatorConfig& config,
                                 const ScalingTable& table,
                                 PlateauPolicy policy) {
    auto [odd, even] = twofold_split(sample);
    const EstimatorConfig cfg = half_config(config, j_star);
    const WaveletFilter filter = make_daubechies_filter(cfg.filter_order);
    const CoefficientSet fit_odd = pyramid_coefficients(odd, cfg, table);
    const CoefficientSet fit_even = pyramid_coefficients(even, cfg, table);

    const std::vector<double> candidates =
        threshold_candidates_half(fit_odd, fit_even);
    if (candidates.empty())
        throw validation_error("empty threshold candidate grid");

    const double factor = rescale_factor(sample.x.size());
    SelectionResult result;
    std::vector<double> scores;
    scores.reserve(candidates.size());
    for (double lambda : candidates) {
        CvScore score;
        const Estimate est_even = nonlinear_estimate(fit_even, filter, lambda);
        accumulate_direction(est_even.values, odd, true, config.noise, score);
        const Estimate est_odd = nonlinear_estimate(fit_odd, filter, lambda);
        accumulate_direction(est_odd.values, even, false, config.noise, score);
        scores.push_back(score.centered);
        result.score_curve.emplace_back(lambda * factor, score.centered);
    }
    const Plateau p = find_plateau(scores, policy);
    result.plateau_first = p.first;
    result.plateau_extent = p.extent;
    result.chosen_index = p.chosen;
    result.chosen_jstar = j_star;
    result.chosen_threshold = candidates[p.chosen] * factor;
    return result;
}

std::vector<double> threshold_candidates_applied(const DesignSample& sample,
                                                 int j_star,
                                                 const EstimatorConfig& config,
                                                 const ScalingTable& table) {
    auto [odd, even] = twofold_split(sample);
    const EstimatorConfig cfg = half_config(config, j_star);
    const CoefficientSet fit_odd = pyramid_coefficients(odd, cfg, table);
    const CoefficientSet fit_even = pyramid_coefficients(even, cfg, table);
    std::vector<double> cand = threshold_candidates_half(fit_odd, fit_even);
    const double factor = rescale_factor(sample.x.size());
    for (double& c : cand) c *= factor;
    return cand;
}

SelectionResult oracle_select(const DesignSample& sample,
                              const TestFunction& true_r,
                              const EstimatorConfig& config,
                              const ScalingTable& table, SelectionTarget target,
                              PlateauPolicy policy) {
    SelectionResult result;
    std::vector<double> scores;
    const WaveletFilter filter = make_daubechies_filter(config.filter_order);

    if (target == SelectionTarget::jstar) {
        const std::vector<int> grid = jstar_candidates(sample.x.size());
        for (int j : grid) {
            EstimatorConfig cfg = config;
            cfg.j_star = j;
            cfg.j1 = j; // only the approximation matters for the linear fit
            cfg.backend = Backend::pyramid;
            const Estimate est =
                linear_estimate(pyramid_coefficients(sample, cfg, table), filter);
            const double mse = design_point_mse(est, true_r, sample.x);
            scores.push_back(mse);
            result.score_curve.emplace_back(static_cast<double>(j), mse);
        }
        const Plateau p = find_plateau(scores, policy);
        result.plateau_first = p.first;
        result.plateau_extent = p.extent;
        result.chosen_index = p.chosen;
        result.chosen_jstar = grid[p.chosen];
        return result;
    }

    // threshold target: full-sample coefficients at config.j_star, exact MSE
    // over the applied candidate grid of the CV selector
    EstimatorConfig cfg = config;
    cfg.backend = Backend::pyramid;
    const CoefficientSet coeffs = pyramid_coefficients(sample, cfg, table);
    const std::vector<double> candidates =
        threshold_candidates_applied(sample, config.j_star, config, table);
    for (double lambda : candidates) {
        const Estimate est = nonlinear_estimate(coeffs, filter, lambda);
        const double mse = design_point_mse(est, true_r, sample.x);
        scores.push_back(mse);
        result.score_curve.emplace_back(lambda, mse);
    }
    const Plateau p = find_plateau(scores, policy);
    result.plateau_first = p.first;
    result.plateau_extent = p.extent;
    result.chosen_index = p.chosen;
    result.chosen_jstar = config.j_star;
    result.chosen_threshold = candidates[p.chosen];
    return result;
}

void dump_score_curve_csv(const SelectionResult& result, std::ostream& out) {
    out << "parameter,cv_score,is_min\n";
    char line[96];
    for (std::size_t i = 0; i < result.score_curve.size(); ++i) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%d\n",
                      result.score_curve[i].first, result.score_curve[i].second,
                      i == result.chosen_index ? 1 : 0);
        out << line;
    }
}

} // namespace wavesq
