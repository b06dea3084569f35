#include "wavesq/harness.hpp"

#include "wavesq/errors.hpp"
#include "wavesq/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace wavesq {

namespace {

int log2_exact(std::size_t n) {
    int j = 0;
    while ((std::size_t{1} << j) < n) ++j;
    return j;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = p * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

} // namespace

double mse(const Estimate& estimate, const TestFunction& true_r,
           const std::vector<double>& design_points) {
    if (design_points.empty())
        throw validation_error("mse needs at least one design point");
    const std::vector<double> fitted = evaluate_estimate(estimate, design_points);
    double acc = 0.0;
    for (std::size_t i = 0; i < design_points.size(); ++i) {
        const double d = true_r(design_points[i]) - fitted[i];
        acc += d * d;
    }
    return acc / static_cast<double>(design_points.size());
}

double mise_grid(const Estimate& estimate, const TestFunction& true_r) {
    double acc = 0.0;
    for (std::size_t i = 0; i < estimate.grid.size(); ++i) {
        const double d = estimate.values[i] - true_r(estimate.grid[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(estimate.grid.size());
}

ReplicationRecord run_replication(const ModelConfig& model_config,
                                  const EstimatorConfig& estimator_config,
                                  std::size_t rep_index,
                                  const ScalingTable& table) {
    ModelConfig rep_model = model_config;
    rep_model.seed = derive_seed(model_config.seed, rep_index);
    const DesignSample sample = generate_sample(rep_model);
    const WaveletFilter filter =
        make_daubechies_filter(estimator_config.filter_order);

    ReplicationRecord rec;
    rec.replication_index = rep_index;
    rec.seed = rep_model.seed;

    // truncation level: CV choice and oracle benchmark on the same grid
    const SelectionResult sel_j =
        select_jstar(sample, estimator_config, table);
    const SelectionResult ora_j = oracle_select(
        sample, model_config.r, estimator_config, table, SelectionTarget::jstar);
    rec.jstar_2fcv = sel_j.chosen_jstar;
    rec.jstar_oracle = ora_j.chosen_jstar;

    EstimatorConfig cfg = estimator_config;
    cfg.backend = Backend::pyramid;
    cfg.j1 = -1; // finest level, the a-priori choice for the nonlinear part

    cfg.j_star = sel_j.chosen_jstar;
    const CoefficientSet coeffs_cv = pyramid_coefficients(sample, cfg, table);
    const Estimate lin_cv = linear_estimate(coeffs_cv, filter);
    rec.mse_lin_2fcv = mse(lin_cv, model_config.r, sample.x);
    rec.mise_lin_2fcv = mise_grid(lin_cv, model_config.r);

    cfg.j_star = ora_j.chosen_jstar;
    const CoefficientSet coeffs_or = pyramid_coefficients(sample, cfg, table);
    const Estimate lin_or = linear_estimate(coeffs_or, filter);
    rec.mse_lin_oracle = mse(lin_or, model_config.r, sample.x);
    rec.mise_lin_oracle = mise_grid(lin_or, model_config.r);

    // global threshold at the CV truncation level, CV pick vs oracle pick on
    // the same applied candidate grid
    const SelectionResult sel_t =
        select_threshold(sample, sel_j.chosen_jstar, estimator_config, table);
    rec.threshold_2fcv = sel_t.chosen_threshold;
    const Estimate non_cv =
        nonlinear_estimate(coeffs_cv, filter, sel_t.chosen_threshold);
    rec.mse_non_2fcv = mse(non_cv, model_config.r, sample.x);
    rec.mise_non_2fcv = mise_grid(non_cv, model_config.r);
    rec.kept_detail_count =
        count_kept_details(coeffs_cv, sel_t.chosen_threshold);

    cfg.j_star = sel_j.chosen_jstar;
    const SelectionResult ora_t = oracle_select(
        sample, model_config.r, cfg, table, SelectionTarget::threshold);
    const Estimate non_or =
        nonlinear_estimate(coeffs_cv, filter, ora_t.chosen_threshold);
    rec.mse_non_oracle = mse(non_or, model_config.r, sample.x);
    rec.mise_non_oracle = mise_grid(non_or, model_config.r);
    return rec;
}

FiveNumber five_number_summary(std::vector<double> values) {
    if (values.empty())
        throw validation_error("summary of an empty metric vector");
    std::sort(values.begin(), values.end());
    FiveNumber f;
    f.min = values.front();
    f.q1 = quantile_sorted(values, 0.25);
    f.median = quantile_sorted(values, 0.5);
    f.q3 = quantile_sorted(values, 0.75);
    f.max = values.back();
    return f;
}

SummaryMap summarize_records(const std::vector<ReplicationRecord>& records) {
    const std::vector<
        std::pair<std::string, double ReplicationRecord::*>>
        metrics = {
            {"mse_lin_2fcv", &ReplicationRecord::mse_lin_2fcv},
            {"mse_lin_oracle", &ReplicationRecord::mse_lin_oracle},
            {"mse_non_2fcv", &ReplicationRecord::mse_non_2fcv},
            {"mse_non_oracle", &ReplicationRecord::mse_non_oracle},
            {"mise_lin_2fcv", &ReplicationRecord::mise_lin_2fcv},
            {"mise_lin_oracle", &ReplicationRecord::mise_lin_oracle},
            {"mise_non_2fcv", &ReplicationRecord::mise_non_2fcv},
            {"mise_non_oracle", &ReplicationRecord::mise_non_oracle},
        };
    SummaryMap summary;
    std::vector<double> column(records.size());
    for (const auto& [name, member] : metrics) {
        for (std::size_t i = 0; i < records.size(); ++i)
            column[i] = records[i].*member;
        summary.emplace(name, five_number_summary(column));
    }
    for (std::size_t i = 0; i < records.size(); ++i)
        column[i] = static_cast<double>(records[i].kept_detail_count);
    summary.emplace("kept_detail_count", five_number_summary(column));
    return summary;
}

MonteCarloResult run_monte_carlo(const ModelConfig& model_config,
                                 const EstimatorConfig& estimator_config,
                                 std::size_t replications, unsigned n_threads) {
    if (replications < 1)
        throw validation_error("need at least one replication");
    const ScalingTable table = cascade_scaling_table(
        make_daubechies_filter(estimator_config.filter_order),
        estimator_config.cascade_depth);

    MonteCarloResult result;
    result.records.resize(replications);
    unsigned workers = n_threads == 0
                           ? std::max(1u, std::thread::hardware_concurrency())
                           : n_threads;
    workers = static_cast<unsigned>(
        std::min<std::size_t>(workers, replications));

    if (workers <= 1) {
        for (std::size_t i = 0; i < replications; ++i)
            result.records[i] =
                run_replication(model_config, estimator_config, i, table);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= replications) break;
                result.records[i] =
                    run_replication(model_config, estimator_config, i, table);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    result.summary = summarize_records(result.records);
    return result;
}

RateStudyResult rate_study(const RateStudyConfig& rate_config,
                           const ModelConfig& model_config,
                           const EstimatorConfig& estimator_config,
                           unsigned n_threads) {
    if (rate_config.n_list.size() < 3)
        throw validation_error("rate study needs at least 3 sample sizes");
    for (std::size_t t = 1; t < rate_config.n_list.size(); ++t)
        if (rate_config.n_list[t] <= rate_config.n_list[t - 1])
            throw validation_error("rate study n_list must be strictly increasing");
    if (rate_config.replications < 1)
        throw validation_error("rate study needs at least one replication");
    if (rate_config.s_prime <= 0.0)
        throw validation_error("effective smoothness s_prime must be positive");

    const ScalingTable table = cascade_scaling_table(
        make_daubechies_filter(estimator_config.filter_order),
        estimator_config.cascade_depth);
    const WaveletFilter filter =
        make_daubechies_filter(estimator_config.filter_order);

    RateStudyResult result;
    result.theoretical_slope =
        -2.0 * rate_config.s_prime / (2.0 * rate_config.s_prime + 1.0);

    const std::size_t reps = rate_config.replications;
    for (std::size_t n : rate_config.n_list) {
        const int big_j = log2_exact(n);
        int tuned_j = -1;
        if (rate_config.rule == RateRule::theorem) {
            // 2^{j_star} ~ n^{1/(2s'+1)}
            tuned_j = static_cast<int>(std::lround(
                static_cast<double>(big_j) / (2.0 * rate_config.s_prime + 1.0)));
            tuned_j = std::clamp(tuned_j, 0, big_j - 1);
        }

        ModelConfig model_n = model_config;
        model_n.r = rate_config.r;
        model_n.n = n;
        const std::uint64_t n_master =
            derive_seed(model_config.seed, static_cast<std::uint64_t>(big_j));

        std::vector<double> mises(reps), mses(reps);
        auto run_one = [&](std::size_t rep) {
            ModelConfig m = model_n;
            m.seed = derive_seed(n_master, rep);
            const DesignSample sample = generate_sample(m);
            EstimatorConfig cfg = estimator_config;
            cfg.backend = Backend::pyramid;
            cfg.j_star = (rate_config.rule == RateRule::theorem)
                             ? tuned_j
                             : select_jstar(sample, estimator_config, table)
                                   .chosen_jstar;
            cfg.j1 = cfg.j_star;
            const Estimate est =
                linear_estimate(pyramid_coefficients(sample, cfg, table), filter);
            mises[rep] = mise_grid(est, rate_config.r);
            mses[rep] = mse(est, rate_config.r, sample.x);
        };

        unsigned workers = n_threads == 0
                               ? std::max(1u, std::thread::hardware_concurrency())
                               : n_threads;
        workers = static_cast<unsigned>(std::min<std::size_t>(workers, reps));
        if (workers <= 1) {
            for (std::size_t rep = 0; rep < reps; ++rep) run_one(rep);
        } else {
            std::atomic<std::size_t> next{0};
            auto worker = [&]() {
                for (;;) {
                    const std::size_t rep = next.fetch_add(1);
                    if (rep >= reps) break;
                    run_one(rep);
                }
            };
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }

        RatePoint point;
        point.n = n;
        point.j_star = tuned_j;
        double mean = 0.0, mse_mean = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            mean += mises[rep];
            mse_mean += mses[rep];
        }
        mean /= static_cast<double>(reps);
        mse_mean /= static_cast<double>(reps);
        double var = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const double d = mises[rep] - mean;
            var += d * d;
        }
        var = reps > 1 ? var / static_cast<double>(reps - 1) : 0.0;
        point.mise_mean = mean;
        point.mise_se = std::sqrt(var / static_cast<double>(reps));
        point.mse_mean = mse_mean;
        result.points.push_back(point);
    }

    // least squares of log MISE on log n
    const std::size_t m = result.points.size();
    double sx = 0.0, sy = 0.0;
    std::vector<double> xs(m), ys(m);
    for (std::size_t t = 0; t < m; ++t) {
        xs[t] = std::log(static_cast<double>(result.points[t].n));
        ys[t] = std::log(result.points[t].mise_mean);
        sx += xs[t];
        sy += ys[t];
    }
    const double mx = sx / static_cast<double>(m);
    const double my = sy / static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
        sxx += (xs[t] - mx) * (xs[t] - mx);
        sxy += (xs[t] - mx) * (ys[t] - my);
    }
    result.slope = sxy / sxx;
    double sse = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
        const double fit = my + result.slope * (xs[t] - mx);
        sse += (ys[t] - fit) * (ys[t] - fit);
    }
    result.slope_se =
        m > 2 ? std::sqrt(sse / static_cast<double>(m - 2) / sxx) : 0.0;
    return result;
}

} // namespace wavesq
