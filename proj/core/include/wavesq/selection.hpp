#pragma once

#include "wavesq/estimator.hpp"
#include "wavesq/model.hpp"
#include "wavesq/wavelet.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace wavesq {

// Tie handling on a flat run of minimal scores: pick its first element
// (matches the observed behavior this code reproduces) or its middle.
enum class PlateauPolicy { first_element, mid_plateau };

struct SelectionResult {
    int chosen_jstar = -1;
    // applied (full-sample scale) threshold; unset for level selection
    double chosen_threshold = -1.0;
    // (candidate parameter, score); for thresholds the parameter is the
    // applied candidate value
    std::vector<std::pair<double, double>> score_curve;
    std::size_t plateau_first = 0;  // index into score_curve
    std::size_t plateau_extent = 0; // run length of the minimal plateau
    std::size_t chosen_index = 0;   // index the policy picked
};

// Even/odd interleave split of the X-sorted sample (0-based: even indices
// 0,2,... and odd indices 1,3,...). Both halves stay X-sorted.
std::pair<DesignSample, DesignSample>
twofold_split(const DesignSample& sample); // returns {odd_half, even_half}

struct CvScore {
    double centered = 0.0; // residuals against Y^2 - E[V^2|X] (the default)
    double raw = 0.0;      // residuals against Y^2 alone
};

// Two-fold CV score of the linear estimator at truncation level j_star:
// fit on one half (pyramid backend), predict each held-out point by averaging
// its two retained neighbors' fitted values (single neighbor at the edges),
// accumulate squared residuals, and add the symmetric direction.
CvScore cv_score_linear_full(const DesignSample& sample, int j_star,
                             const EstimatorConfig& config,
                             const ScalingTable& table);
double cv_score_linear(const DesignSample& sample, int j_star,
                       const EstimatorConfig& config,
                       const ScalingTable& table);

// Minimize the linear CV score over j_star = 0 .. log2(n)-2 (the half-sample
// pyramid cap).
SelectionResult select_jstar(const DesignSample& sample,
                             const EstimatorConfig& config,
                             const ScalingTable& table,
                             PlateauPolicy policy = PlateauPolicy::first_element);

// Minimize the nonlinear CV score over the candidate grid made of every
// distinct half-sample |beta_hat| plus 0 and +infinity, at truncation level
// j_star. The chosen half-sample threshold is rescaled to the full sample via
// lambda_n = lambda_{n/2} * sqrt(1 - ln2/ln n).
SelectionResult select_threshold(const DesignSample& sample, int j_star,
                                 const EstimatorConfig& config,
                                 const ScalingTable& table,
                                 PlateauPolicy policy = PlateauPolicy::first_element);

// The candidate grids the selectors above minimize over (exposed so oracle
// selection provably searches the same grids).
std::vector<int> jstar_candidates(std::size_t n);
std::vector<double> threshold_candidates_applied(const DesignSample& sample,
                                                 int j_star,
                                                 const EstimatorConfig& config,
                                                 const ScalingTable& table);

enum class SelectionTarget { jstar, threshold };

// Benchmark selection with the true r in hand: argmin of the exact
// design-point MSE over the same candidate grid the CV selector uses.
// For target == threshold the truncation level is config.j_star.
SelectionResult oracle_select(const DesignSample& sample,
                              const TestFunction& true_r,
                              const EstimatorConfig& config,
                              const ScalingTable& table, SelectionTarget target,
                              PlateauPolicy policy = PlateauPolicy::first_element);

// CSV rows (parameter, cv_score, is_min) behind a selection curve.
void dump_score_curve_csv(const SelectionResult& result, std::ostream& out);

} // namespace wavesq
