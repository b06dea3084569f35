#pragma once

#include "wavesq/estimator.hpp"
#include "wavesq/model.hpp"
#include "wavesq/selection.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace wavesq {

// Everything one replication produces: design-point MSEs (the selection
// loss), grid-integrated squared errors (the theorem's loss), and the
// selected parameters. Both error flavors are recorded because they differ
// slightly and downstream tables must label which one they show.
struct ReplicationRecord {
    std::size_t replication_index = 0;
    std::uint64_t seed = 0;
    double mse_lin_2fcv = 0.0;
    double mse_lin_oracle = 0.0;
    double mse_non_2fcv = 0.0;
    double mse_non_oracle = 0.0;
    int jstar_2fcv = -1;
    int jstar_oracle = -1;
    double threshold_2fcv = 0.0; // applied full-sample threshold (may be inf)
    std::size_t kept_detail_count = 0;
    double mise_lin_2fcv = 0.0;
    double mise_lin_oracle = 0.0;
    double mise_non_2fcv = 0.0;
    double mise_non_oracle = 0.0;
};

// Design-point loss (1/m) sum_i (r(x_i) - estimate(x_i))^2 via interpolation.
double mse(const Estimate& estimate, const TestFunction& true_r,
           const std::vector<double>& design_points);

// Grid loss: mean of (estimate - r)^2 over the reconstruction grid, i.e. the
// periodic trapezoid approximation of the integrated squared error.
double mise_grid(const Estimate& estimate, const TestFunction& true_r);

// One full experiment: generate (seed derived from the model seed and
// rep_index), select j_star and the threshold by 2FCV and by the oracle,
// reconstruct, and measure. Pure function of (configs, rep_index).
// estimator_config.j_star/j1 are ignored: selection chooses the truncation
// and details run to the finest level.
ReplicationRecord run_replication(const ModelConfig& model_config,
                                  const EstimatorConfig& estimator_config,
                                  std::size_t rep_index,
                                  const ScalingTable& table);

struct FiveNumber {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

// Quartiles use linear interpolation of order statistics (the common
// statistical-software default).
FiveNumber five_number_summary(std::vector<double> values);

using SummaryMap = std::map<std::string, FiveNumber>;

// Five-number summaries of every MSE/MISE metric plus kept_detail_count;
// a pure function of the record set.
SummaryMap summarize_records(const std::vector<ReplicationRecord>& records);

struct MonteCarloResult {
    std::vector<ReplicationRecord> records; // ordered by replication_index
    SummaryMap summary;
};

// N replications, optionally in parallel (n_threads 0 = hardware pick).
// Records land in a preallocated slot per index, so output is byte-identical
// regardless of scheduling.
MonteCarloResult run_monte_carlo(const ModelConfig& model_config,
                                 const EstimatorConfig& estimator_config,
                                 std::size_t replications,
                                 unsigned n_threads = 0);

enum class RateRule { theorem, cv };

struct RateStudyConfig {
    TestFunction r;
    std::vector<std::size_t> n_list;
    std::size_t replications = 50;
    // Effective smoothness s' of the target: the tuned truncation level is
    // j_star(n) = round(log2(n)/(2s'+1)) and the reference MISE slope is
    // -2s'/(2s'+1).
    double s_prime = 0.5;
    RateRule rule = RateRule::theorem;
};

struct RatePoint {
    std::size_t n = 0;
    int j_star = -1; // theorem-tuned level, or -1 when chosen per sample by CV
    double mise_mean = 0.0;
    double mise_se = 0.0; // standard error of the Monte Carlo mean
    double mse_mean = 0.0;
};

struct RateStudyResult {
    std::vector<RatePoint> points;
    double slope = 0.0; // least-squares fit of log MISE against log n
    double slope_se = 0.0;
    double theoretical_slope = 0.0; // -2s'/(2s'+1)
};

// Monte Carlo MISE of the linear estimator along n_list. Seeds chain as
// derive_seed(derive_seed(master, log2(n)), rep) so each (n, rep) cell is a
// fixed independent stream.
RateStudyResult rate_study(const RateStudyConfig& rate_config,
                           const ModelConfig& model_config,
                           const EstimatorConfig& estimator_config,
                           unsigned n_threads = 0);

} // namespace wavesq
