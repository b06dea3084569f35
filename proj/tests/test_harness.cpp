#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "wavesq/errors.hpp"
#include "wavesq/estimator.hpp"
#include "wavesq/harness.hpp"
#include "wavesq/io.hpp"
#include "wavesq/model.hpp"
#include "wavesq/rng.hpp"
#include "wavesq/svg.hpp"
#include "wavesq/wavelet.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

using namespace wavesq;

namespace {

TestFunction smooth_sine() {
    return TestFunction{
        "sine", [](double x) { return 0.6 + 0.25 * std::sin(2.0 * M_PI * x); }, 0.0};
}

// estimate whose values are f evaluated on a uniform m-point grid
Estimate tabulated(const TestFunction& f, std::size_t m, double offset = 0.0) {
    Estimate e;
    e.grid.resize(m);
    e.values.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        e.grid[i] = static_cast<double>(i) / static_cast<double>(m);
        e.values[i] = f(e.grid[i]) + offset;
    }
    return e;
}

ModelConfig blip_config(std::size_t n, double sigma2, std::uint64_t seed) {
    ModelConfig mc;
    mc.r = test_function("blip");
    mc.n = n;
    mc.sigma2 = sigma2;
    mc.seed = seed;
    return mc;
}

bool same_record(const ReplicationRecord& a, const ReplicationRecord& b) {
    return a.replication_index == b.replication_index && a.seed == b.seed &&
           a.mse_lin_2fcv == b.mse_lin_2fcv &&
           a.mse_lin_oracle == b.mse_lin_oracle &&
           a.mse_non_2fcv == b.mse_non_2fcv &&
           a.mse_non_oracle == b.mse_non_oracle &&
           a.jstar_2fcv == b.jstar_2fcv && a.jstar_oracle == b.jstar_oracle &&
           a.threshold_2fcv == b.threshold_2fcv &&
           a.kept_detail_count == b.kept_detail_count &&
           a.mise_lin_2fcv == b.mise_lin_2fcv &&
           a.mise_lin_oracle == b.mise_lin_oracle &&
           a.mise_non_2fcv == b.mise_non_2fcv &&
           a.mise_non_oracle == b.mise_non_oracle;
}

ScalingTable default_table() {
    EstimatorConfig ec;
    return cascade_scaling_table(make_daubechies_filter(ec.filter_order),
                                 ec.cascade_depth);
}

} // namespace

TEST_CASE("design point error vanishes for an exact tabulation") {
    const TestFunction r = test_function("blip");
    const Estimate e = tabulated(r, 256);
    // linear interpolation is exact at the nodes themselves
    CHECK(mse(e, r, e.grid) == 0.0);
}

TEST_CASE("a constant offset costs its square in design point error") {
    const TestFunction r = test_function("ramp");
    const double c = 0.125;
    const Estimate e = tabulated(r, 512, c);
    CHECK(mse(e, r, e.grid) == doctest::Approx(c * c).epsilon(1e-13));
}

TEST_CASE("design point error ignores the order of the points") {
    const TestFunction r = test_function("parabolas");
    const Estimate e = tabulated(r, 128, 0.03);
    std::vector<double> points;
    for (int i = 0; i < 200; ++i)
        points.push_back(static_cast<double>((i * 73) % 200) / 200.0);
    std::vector<double> shuffled = points;
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(mse(e, r, points) ==
          doctest::Approx(mse(e, r, shuffled)).epsilon(1e-13));
}

TEST_CASE("design point error requires at least one point") {
    const Estimate e = tabulated(test_function("blip"), 64);
    CHECK_THROWS_AS(mse(e, test_function("blip"), {}), validation_error);
}

TEST_CASE("grid quadrature error of a shifted tabulation is its square") {
    const TestFunction r = test_function("blip");
    const double c = 0.25;
    const Estimate e = tabulated(r, 1024, c);
    CHECK(mise_grid(e, r) == doctest::Approx(c * c).epsilon(1e-13));
    CHECK(mise_grid(tabulated(r, 1024), r) == 0.0);
}

TEST_CASE("five number summary interpolates the quartiles linearly") {
    // order statistics 1..4: quartiles fall three quarters between neighbors
    FiveNumber f = five_number_summary({4.0, 1.0, 3.0, 2.0});
    CHECK(f.min == 1.0);
    CHECK(f.q1 == doctest::Approx(1.75).epsilon(1e-15));
    CHECK(f.median == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(f.q3 == doctest::Approx(3.25).epsilon(1e-15));
    CHECK(f.max == 4.0);

    FiveNumber g = five_number_summary({3.0, 1.0, 2.0});
    CHECK(g.q1 == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(g.median == 2.0);
    CHECK(g.q3 == doctest::Approx(2.5).epsilon(1e-15));

    FiveNumber h = five_number_summary({7.0});
    CHECK(h.min == 7.0);
    CHECK(h.q1 == 7.0);
    CHECK(h.median == 7.0);
    CHECK(h.q3 == 7.0);
    CHECK(h.max == 7.0);

    CHECK_THROWS_AS(five_number_summary({}), validation_error);
}

TEST_CASE("a replication is a pure function of its index") {
    const ScalingTable table = default_table();
    const ModelConfig mc = blip_config(1024, 0.01, 3);
    const EstimatorConfig ec;

    const ReplicationRecord a = run_replication(mc, ec, 2, table);
    const ReplicationRecord b = run_replication(mc, ec, 2, table);
    CHECK(same_record(a, b));
    CHECK(a.replication_index == 2);
    CHECK(a.seed == derive_seed(mc.seed, 2));

    const ReplicationRecord c = run_replication(mc, ec, 1, table);
    CHECK(c.seed != a.seed);
    CHECK(c.mse_lin_2fcv != a.mse_lin_2fcv);
}

TEST_CASE("oracle choices never lose to cross validation in sample error") {
    const ScalingTable table = default_table();
    const ModelConfig mc = blip_config(1024, 0.01, 3);
    const EstimatorConfig ec;
    for (std::size_t rep = 0; rep < 4; ++rep) {
        const ReplicationRecord r = run_replication(mc, ec, rep, table);
        CHECK(r.mse_lin_oracle >= 0.0);
        CHECK(r.mse_non_oracle >= 0.0);
        // the oracle minimizes the same loss over a superset of the applied choices
        CHECK(r.mse_lin_oracle <= r.mse_lin_2fcv * (1.0 + 1e-12) + 1e-300);
        CHECK(r.mse_non_oracle <= r.mse_non_2fcv * (1.0 + 1e-12) + 1e-300);
        CHECK(r.jstar_2fcv >= 0);
        CHECK(r.jstar_oracle >= 0);
        CHECK(r.jstar_2fcv <= 9);
    }
}

TEST_CASE("noiseless smooth data reconstructs to sampling accuracy") {
    const ScalingTable table = default_table();
    ModelConfig mc;
    mc.r = smooth_sine();
    mc.n = 4096;
    mc.sigma2 = 0.0;
    mc.u_law = ULaw::constant_one;
    mc.u_standardize = false;
    mc.seed = 5;
    const EstimatorConfig ec;
    const ReplicationRecord rec = run_replication(mc, ec, 0, table);
    CHECK(rec.mse_lin_oracle < 1e-3);
    CHECK(rec.mise_lin_oracle < 1e-3);
}

TEST_CASE("single replication summary collapses to the record") {
    const ModelConfig mc = blip_config(512, 0.01, 9);
    const EstimatorConfig ec;
    const MonteCarloResult res = run_monte_carlo(mc, ec, 1, 1);
    REQUIRE(res.records.size() == 1);
    const ReplicationRecord& r = res.records[0];
    REQUIRE(res.summary.size() == 9);
    const std::vector<std::pair<std::string, double>> expect = {
        {"mse_lin_2fcv", r.mse_lin_2fcv},
        {"mse_lin_oracle", r.mse_lin_oracle},
        {"mse_non_2fcv", r.mse_non_2fcv},
        {"mse_non_oracle", r.mse_non_oracle},
        {"mise_lin_2fcv", r.mise_lin_2fcv},
        {"mise_lin_oracle", r.mise_lin_oracle},
        {"mise_non_2fcv", r.mise_non_2fcv},
        {"mise_non_oracle", r.mise_non_oracle},
        {"kept_detail_count", static_cast<double>(r.kept_detail_count)},
    };
    for (const auto& [key, value] : expect) {
        REQUIRE(res.summary.count(key) == 1);
        const FiveNumber& f = res.summary.at(key);
        CHECK(f.min == value);
        CHECK(f.q1 == value);
        CHECK(f.median == value);
        CHECK(f.q3 == value);
        CHECK(f.max == value);
    }
}

TEST_CASE("summaries recompute exactly from the stored records") {
    const ModelConfig mc = blip_config(512, 0.01, 9);
    const EstimatorConfig ec;
    const MonteCarloResult res = run_monte_carlo(mc, ec, 5, 1);
    REQUIRE(res.records.size() == 5);
    for (std::size_t i = 0; i < res.records.size(); ++i)
        CHECK(res.records[i].replication_index == i);

    const SummaryMap redo = summarize_records(res.records);
    REQUIRE(redo.size() == res.summary.size());
    for (const auto& [key, five] : res.summary) {
        const FiveNumber& g = redo.at(key);
        CHECK(five.min == g.min);
        CHECK(five.q1 == g.q1);
        CHECK(five.median == g.median);
        CHECK(five.q3 == g.q3);
        CHECK(five.max == g.max);
    }
}

TEST_CASE("the record stream is independent of the thread schedule") {
    const ModelConfig mc = blip_config(512, 0.01, 21);
    const EstimatorConfig ec;
    const MonteCarloResult one = run_monte_carlo(mc, ec, 4, 1);
    const MonteCarloResult three = run_monte_carlo(mc, ec, 4, 3);
    REQUIRE(one.records.size() == three.records.size());
    for (std::size_t i = 0; i < one.records.size(); ++i)
        CHECK(same_record(one.records[i], three.records[i]));
    for (const auto& [key, five] : one.summary) {
        const FiveNumber& g = three.summary.at(key);
        CHECK(five.min == g.min);
        CHECK(five.median == g.median);
        CHECK(five.max == g.max);
    }
}

TEST_CASE("rate study rejects degenerate sample size grids") {
    ModelConfig mc = blip_config(256, 0.01, 13);
    const EstimatorConfig ec;
    RateStudyConfig rc;
    rc.r = mc.r;
    rc.replications = 2;

    rc.n_list = {256, 512};
    CHECK_THROWS_AS(rate_study(rc, mc, ec, 1), validation_error);
    rc.n_list = {256, 512, 512};
    CHECK_THROWS_AS(rate_study(rc, mc, ec, 1), validation_error);
    rc.n_list = {512, 256, 1024};
    CHECK_THROWS_AS(rate_study(rc, mc, ec, 1), validation_error);
    rc.n_list = {256, 512, 1024};
    rc.replications = 0;
    CHECK_THROWS_AS(rate_study(rc, mc, ec, 1), validation_error);
    rc.replications = 2;
    rc.s_prime = 0.0;
    CHECK_THROWS_AS(rate_study(rc, mc, ec, 1), validation_error);
}

TEST_CASE("noiseless projection error falls as samples accumulate") {
    ModelConfig mc;
    mc.r = smooth_sine();
    mc.n = 256;
    mc.sigma2 = 0.0;
    mc.u_law = ULaw::constant_one;
    mc.u_standardize = false;
    mc.seed = 11;
    const EstimatorConfig ec;

    RateStudyConfig rc;
    rc.r = mc.r;
    rc.n_list = {256, 512, 1024};
    rc.replications = 2;
    rc.s_prime = 0.05; // near-zero smoothness exponent drives the level to its cap
    rc.rule = RateRule::theorem;

    const RateStudyResult res = rate_study(rc, mc, ec, 1);
    REQUIRE(res.points.size() == 3);
    CHECK(res.points[0].j_star == 7);
    CHECK(res.points[1].j_star == 8);
    CHECK(res.points[2].j_star == 9);
    CHECK(res.points[0].mise_mean > res.points[1].mise_mean);
    CHECK(res.points[1].mise_mean > res.points[2].mise_mean);
    CHECK(res.slope < 0.0);
    CHECK(res.theoretical_slope ==
          doctest::Approx(-2.0 * 0.05 / (2.0 * 0.05 + 1.0)).epsilon(1e-15));
    for (const RatePoint& p : res.points) {
        CHECK(p.mise_mean > 0.0);
        CHECK(p.mise_se >= 0.0);
        CHECK(p.mse_mean > 0.0);
    }
}

TEST_CASE("theorem tuning sets the level from the smoothness exponent") {
    ModelConfig mc = blip_config(256, 0.01, 13);
    const EstimatorConfig ec;
    RateStudyConfig rc;
    rc.r = mc.r;
    rc.n_list = {256, 512, 1024};
    rc.replications = 4;
    rc.s_prime = 0.5; // level = round(log2(n)/2)
    rc.rule = RateRule::theorem;

    const RateStudyResult four = rate_study(rc, mc, ec, 1);
    CHECK(four.points[0].j_star == 4);
    CHECK(four.points[1].j_star == 5);
    CHECK(four.points[2].j_star == 5);
    CHECK(four.slope < 0.0);
    CHECK(four.theoretical_slope == doctest::Approx(-0.5).epsilon(1e-15));

    // doubling the replication count moves the slope by less than its own
    // fitted standard error
    rc.replications = 8;
    const RateStudyResult eight = rate_study(rc, mc, ec, 1);
    CHECK(std::fabs(four.slope - eight.slope) <= four.slope_se);

    // per-sample selection leaves the tuned level unset in the table
    rc.replications = 2;
    rc.rule = RateRule::cv;
    const RateStudyResult cv = rate_study(rc, mc, ec, 1);
    for (const RatePoint& p : cv.points) CHECK(p.j_star == -1);
    CHECK(cv.slope < 0.0);
}

TEST_CASE("boxplot drawing is deterministic and self contained") {
    std::vector<std::pair<std::string, FiveNumber>> groups = {
        {"lin", FiveNumber{0.001, 0.002, 0.003, 0.005, 0.009}},
        {"non", FiveNumber{0.002, 0.003, 0.004, 0.006, 0.012}},
    };
    std::ostringstream a, b;
    write_boxplot_svg(a, "squared error", "mse", groups);
    write_boxplot_svg(b, "squared error", "mse", groups);
    const std::string s = a.str();
    CHECK(s == b.str());
    CHECK(s.rfind("<svg", 0) == 0);
    CHECK(s.find("</svg>") != std::string::npos);
    CHECK(s.find("squared error") != std::string::npos);
    CHECK(s.find("lin") != std::string::npos);

    std::ostringstream single;
    write_boxplot_svg(single, "one group", "mse",
                      {{"only", FiveNumber{1.0, 2.0, 3.0, 4.0, 5.0}}});
    CHECK(single.str().rfind("<svg", 0) == 0);
}

TEST_CASE("rate plot drawing is deterministic") {
    RateStudyResult res;
    res.points = {
        RatePoint{256, 4, 0.015, 0.002, 0.016},
        RatePoint{512, 5, 0.009, 0.001, 0.010},
        RatePoint{1024, 5, 0.006, 0.001, 0.006},
    };
    res.slope = -0.66;
    res.slope_se = 0.05;
    res.theoretical_slope = -0.5;
    std::ostringstream a, b;
    write_rate_svg(a, "error against sample size", res);
    write_rate_svg(b, "error against sample size", res);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("<svg", 0) == 0);
    CHECK(a.str().find("</svg>") != std::string::npos);
}

TEST_CASE("record rows serialize with the configuration echo") {
    ReplicationRecord r;
    r.replication_index = 0;
    r.seed = 42;
    r.mse_lin_2fcv = 0.25;
    r.mse_lin_oracle = 0.125;
    r.mse_non_2fcv = 0.5;
    r.mse_non_oracle = 0.0625;
    r.jstar_2fcv = 4;
    r.jstar_oracle = 3;
    r.threshold_2fcv = std::numeric_limits<double>::infinity();
    r.kept_detail_count = 7;
    r.mise_lin_2fcv = 0.25;
    r.mise_lin_oracle = 0.125;
    r.mise_non_2fcv = 0.5;
    r.mise_non_oracle = 0.0625;
    ReplicationRecord s = r;
    s.replication_index = 1;
    s.seed = 43;
    s.threshold_2fcv = 0.75;

    const ConfigEcho echo = {{"function", "blip"}, {"n", "512"}};
    std::ostringstream out;
    write_records_csv({r, s}, echo, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "# function=blip");
    std::getline(in, line);
    CHECK(line == "# n=512");
    std::getline(in, line);
    CHECK(line ==
          "replication_index,seed,mse_lin_2fcv,mse_lin_oracle,mse_non_2fcv,"
          "mse_non_oracle,jstar_2fcv,jstar_oracle,threshold_2fcv,"
          "kept_detail_count,mise_lin_2fcv,mise_lin_oracle,mise_non_2fcv,"
          "mise_non_oracle");
    std::getline(in, line);
    CHECK(line.rfind("0,42,0.25,0.125,0.5,0.0625,4,3,inf,7,", 0) == 0);
    std::getline(in, line);
    CHECK(line.rfind("1,43,", 0) == 0);
    CHECK(line.find(",0.75,") != std::string::npos);
    CHECK(!std::getline(in, line));
}

TEST_CASE("summary json roundtrips through a parser") {
    SummaryMap summary;
    summary.emplace("mse_lin_2fcv", FiveNumber{0.001, 0.002, 0.0035, 0.0049, 0.011});
    summary.emplace("kept_detail_count", FiveNumber{0.0, 1.0, 2.0, 4.0, 9.0});
    const ConfigEcho echo = {{"function", "ramp"}, {"sigma2", "0.01"}};
    std::ostringstream out;
    write_summary_json(summary, echo, out);

    const nlohmann::json doc = nlohmann::json::parse(out.str());
    CHECK(doc.at("config").at("function") == "ramp");
    CHECK(doc.at("config").at("sigma2") == "0.01");
    CHECK(doc.at("metrics").at("mse_lin_2fcv").at("median").get<double>() == 0.0035);
    CHECK(doc.at("metrics").at("mse_lin_2fcv").at("max").get<double>() == 0.011);
    CHECK(doc.at("metrics").at("kept_detail_count").at("q3").get<double>() == 4.0);
}

TEST_CASE("sample and estimate writers emit one row per entry") {
    DesignSample sample;
    sample.x = {0.1, 0.4, 0.9};
    sample.y = {1.0, -2.0, 0.5};
    std::ostringstream out;
    write_sample_csv(sample, {{"seed", "1"}}, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "# seed=1");
    std::getline(in, line);
    CHECK(line == "x,y");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);

    Estimate lin = tabulated(test_function("blip"), 8);
    Estimate non = tabulated(test_function("blip"), 8, 0.01);
    const TestFunction r = test_function("blip");
    std::ostringstream both, bare;
    write_estimate_csv(lin, &non, &r, {}, both);
    write_estimate_csv(lin, nullptr, nullptr, {}, bare);
    std::istringstream bin(both.str());
    std::getline(bin, line);
    CHECK(line == "grid,linear,nonlinear,true_r");
    std::istringstream nin(bare.str());
    std::getline(nin, line);
    CHECK(line == "grid,linear");
}

TEST_CASE("rate table writer leads with the slope metadata") {
    RateStudyResult res;
    res.points = {RatePoint{256, 4, 0.015, 0.002, 0.016},
                  RatePoint{512, 5, 0.009, 0.001, 0.010},
                  RatePoint{1024, 5, 0.006, 0.001, 0.006}};
    res.slope = -0.66;
    res.slope_se = 0.05;
    res.theoretical_slope = -0.5;
    std::ostringstream out;
    write_rate_csv(res, {{"function", "parabolas"}}, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "# function=parabolas");
    std::getline(in, line);
    CHECK(line == "# slope=-0.66000000000000003");
    std::getline(in, line);
    CHECK(line.rfind("# slope_se=", 0) == 0);
    std::getline(in, line);
    CHECK(line.rfind("# theoretical_slope=", 0) == 0);
    std::getline(in, line);
    CHECK(line == "n,j_star,mise_mean,mise_se,mse_mean");
    std::getline(in, line);
    CHECK(line.rfind("256,4,", 0) == 0);
}

TEST_CASE("output files must be creatable") {
    CHECK_THROWS_AS(open_output("/nonexistent-dir/sub/file.csv"), io_error);
}
