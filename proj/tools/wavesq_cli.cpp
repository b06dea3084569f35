// Batch front end: simulate / estimate / mc / rate subcommands writing CSV,
// JSON and SVG artifacts with the run configuration echoed into each header.
#include "CLI11.hpp"

#include "wavesq/errors.hpp"
#include "wavesq/estimator.hpp"
#include "wavesq/harness.hpp"
#include "wavesq/io.hpp"
#include "wavesq/model.hpp"
#include "wavesq/selection.hpp"
#include "wavesq/svg.hpp"
#include "wavesq/wavelet.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

using namespace wavesq;

namespace {

struct Options {
    std::string config_path;
    std::string function = "blip";
    std::size_t n = 4096;
    double sigma2 = 0.01;
    std::uint64_t seed = 1;
    std::string u_law = "uniform";
    bool u_standardize = true;
    std::string noise_mode = "a5";
    std::string g_spec;
    int wavelet = 8;
    int jstar = -1;               // -1: two-fold cross validation
    int j1 = -1;                  // -1: finest level
    double kappa = 1.0;
    std::string threshold = "cv"; // cv | universal | a number
    std::string method = "both";  // linear | nonlinear | both
    std::size_t replications = 100;
    unsigned threads = 0;
    std::string n_list = "1024,2048,4096";
    double s_prime = 0.5;
    std::string rule = "theorem"; // theorem | cv
    std::string input;
    std::string outdir = ".";
};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw validation_error(what + " is not a number: '" + text + "'");
    }
}

std::function<double(double)> parse_g(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw validation_error("--g expects const:<value> or sine:<amplitude>");
    const std::string kind = spec.substr(0, colon);
    const double value = parse_number(spec.substr(colon + 1), "--g parameter");
    if (kind == "const") return [value](double) { return value; };
    if (kind == "sine")
        return [value](double x) { return value * std::sin(2.0 * M_PI * x); };
    throw validation_error("--g kind must be const or sine, got '" + kind + "'");
}

std::vector<std::size_t> parse_n_list(const std::string& text) {
    std::vector<std::size_t> ns;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
            ns.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw validation_error("--n-list entry is not an integer: '" + token + "'");
        }
    }
    if (ns.empty()) throw validation_error("--n-list is empty");
    return ns;
}

ModelConfig model_from(const Options& o) {
    ModelConfig mc;
    mc.r = test_function(o.function);
    mc.n = o.n;
    mc.sigma2 = o.sigma2;
    mc.seed = o.seed;
    if (o.u_law == "uniform") mc.u_law = ULaw::uniform_pm1;
    else if (o.u_law == "gaussian") mc.u_law = ULaw::gaussian;
    else if (o.u_law == "one") mc.u_law = ULaw::constant_one;
    else throw validation_error("--u-law must be uniform, gaussian or one");
    mc.u_standardize = o.u_standardize;
    if (o.noise_mode == "a5") mc.noise_mode = NoiseMode::a5;
    else if (o.noise_mode == "a6") mc.noise_mode = NoiseMode::a6;
    else throw validation_error("--noise-mode must be a5 or a6");
    if (mc.noise_mode == NoiseMode::a6) {
        if (o.g_spec.empty())
            throw validation_error("--noise-mode a6 needs --g const:<v> or sine:<amp>");
        mc.g = parse_g(o.g_spec);
    }
    return mc;
}

EstimatorConfig estimator_from(const Options& o) {
    EstimatorConfig ec;
    ec.j1 = o.j1;
    ec.kappa = o.kappa;
    ec.filter_order = o.wavelet;
    if (o.noise_mode == "a6") {
        if (o.g_spec.empty())
            throw validation_error("--noise-mode a6 needs --g const:<v> or sine:<amp>");
        ec.noise = noise_a6(parse_g(o.g_spec));
    } else {
        ec.noise = noise_a5(o.sigma2);
    }
    return ec;
}

ConfigEcho echo_common(const std::string& command, const Options& o,
                       bool with_estimator) {
    ConfigEcho e;
    e.push_back({"command", command});
    e.push_back({"function", o.function});
    e.push_back({"n", std::to_string(o.n)});
    e.push_back({"sigma2", fmt17(o.sigma2)});
    e.push_back({"seed", std::to_string(o.seed)});
    e.push_back({"u_law", o.u_law});
    e.push_back({"u_standardize", o.u_standardize ? "true" : "false"});
    e.push_back({"noise_mode", o.noise_mode});
    if (!o.g_spec.empty()) e.push_back({"g", o.g_spec});
    if (with_estimator) {
        e.push_back({"wavelet", std::to_string(o.wavelet)});
        e.push_back({"jstar", std::to_string(o.jstar)});
        e.push_back({"j1", std::to_string(o.j1)});
        e.push_back({"kappa", fmt17(o.kappa)});
    }
    return e;
}

// x,y CSV produced by the simulate command (or anything matching its shape)
DesignSample read_sample_csv(const std::string& path, const ModelConfig& base) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    DesignSample sample;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "x,y")
                throw validation_error("sample file must have an x,y header, got '" +
                                       line + "'");
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw validation_error("sample row without a comma: '" + line + "'");
        sample.x.push_back(parse_number(line.substr(0, comma), "sample x"));
        sample.y.push_back(parse_number(line.substr(comma + 1), "sample y"));
    }
    if (!header_seen) throw validation_error("sample file has no x,y header");
    ModelConfig cfg = base;
    cfg.n = sample.x.size();
    validate_model_config(cfg);
    for (std::size_t i = 0; i < sample.x.size(); ++i) {
        if (!(sample.x[i] >= 0.0) || !(sample.x[i] < 1.0))
            throw validation_error("sample x values must lie in [0,1)");
        if (i > 0 && sample.x[i] < sample.x[i - 1])
            throw validation_error("sample x values must be sorted ascending");
    }
    sample.config = cfg;
    return sample;
}

void finish_file(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw io_error("write failed for '" + path + "'");
}

int cmd_simulate(const Options& o) {
    const ModelConfig mc = model_from(o);
    const DesignSample sample = generate_sample(mc);
    const ConfigEcho echo = echo_common("simulate", o, false);
    const std::string path = o.outdir + "/sample.csv";
    std::ofstream out = open_output(path);
    write_sample_csv(sample, echo, out);
    finish_file(out, path);
    std::cout << "wrote " << path << " (" << sample.x.size() << " rows)\n";
    return 0;
}

int cmd_estimate(const Options& o) {
    if (o.method != "linear" && o.method != "nonlinear" && o.method != "both")
        throw validation_error("--method must be linear, nonlinear or both");
    const ModelConfig mc = model_from(o);
    const EstimatorConfig base = estimator_from(o);
    const WaveletFilter filter = make_daubechies_filter(base.filter_order);
    const ScalingTable table = cascade_scaling_table(filter, base.cascade_depth);

    const DesignSample sample =
        o.input.empty() ? generate_sample(mc) : read_sample_csv(o.input, mc);
    const std::size_t n = sample.x.size();

    EstimatorConfig ec = base;
    ec.backend = Backend::pyramid;

    SelectionResult jsel;
    bool jstar_selected = false;
    if (o.jstar >= 0) {
        ec.j_star = o.jstar;
    } else {
        jsel = select_jstar(sample, base, table);
        ec.j_star = jsel.chosen_jstar;
        jstar_selected = true;
    }
    validate_estimator_config(ec, n);

    const CoefficientSet coeffs = pyramid_coefficients(sample, ec, table);
    const Estimate lin = linear_estimate(coeffs, filter);

    double threshold = std::numeric_limits<double>::infinity();
    SelectionResult tsel;
    bool threshold_selected = false;
    Estimate non;
    bool have_non = false;
    if (o.method != "linear") {
        if (o.threshold == "cv") {
            tsel = select_threshold(sample, ec.j_star, base, table);
            threshold = tsel.chosen_threshold;
            threshold_selected = true;
        } else if (o.threshold == "universal") {
            threshold = universal_threshold(n, o.kappa);
        } else {
            threshold = parse_number(o.threshold, "--threshold");
            if (threshold < 0.0)
                throw validation_error("--threshold must be nonnegative");
        }
        non = nonlinear_estimate(coeffs, filter, threshold);
        have_non = true;
    }

    ConfigEcho echo = echo_common("estimate", o, true);
    echo.push_back({"method", o.method});
    echo.push_back({"threshold", o.threshold});
    if (!o.input.empty()) echo.push_back({"input", o.input});
    echo.push_back({"jstar_applied", std::to_string(ec.j_star)});
    if (have_non) echo.push_back({"threshold_applied", fmt17(threshold)});

    {
        const std::string path = o.outdir + "/estimate.csv";
        std::ofstream out = open_output(path);
        write_estimate_csv(lin, have_non ? &non : nullptr, &mc.r, echo, out);
        finish_file(out, path);
    }
    {
        const std::string path = o.outdir + "/coefficients.csv";
        std::ofstream out = open_output(path);
        write_config_echo(echo, out);
        dump_coefficients_csv(coeffs, threshold, out);
        finish_file(out, path);
    }
    if (jstar_selected) {
        const std::string path = o.outdir + "/scores_jstar.csv";
        std::ofstream out = open_output(path);
        write_config_echo(echo, out);
        dump_score_curve_csv(jsel, out);
        finish_file(out, path);
    }
    if (threshold_selected) {
        const std::string path = o.outdir + "/scores_threshold.csv";
        std::ofstream out = open_output(path);
        write_config_echo(echo, out);
        dump_score_curve_csv(tsel, out);
        finish_file(out, path);
    }
    std::cout << "jstar=" << ec.j_star << "\n";
    if (have_non) std::cout << "threshold=" << fmt17(threshold) << "\n";
    return 0;
}

int cmd_mc(const Options& o) {
    if (o.replications < 1) throw validation_error("--N must be at least 1");
    const ModelConfig mc = model_from(o);
    const EstimatorConfig ec = estimator_from(o);
    const MonteCarloResult res =
        run_monte_carlo(mc, ec, o.replications, o.threads);

    ConfigEcho echo = echo_common("mc", o, true);
    echo.push_back({"N", std::to_string(o.replications)});

    {
        const std::string path = o.outdir + "/records.csv";
        std::ofstream out = open_output(path);
        write_records_csv(res.records, echo, out);
        finish_file(out, path);
    }
    {
        const std::string path = o.outdir + "/summary.json";
        std::ofstream out = open_output(path);
        write_summary_json(res.summary, echo, out);
        finish_file(out, path);
    }
    {
        const std::string path = o.outdir + "/boxplot.svg";
        std::ofstream out = open_output(path);
        const std::vector<std::pair<std::string, FiveNumber>> groups = {
            {"lin 2fcv", res.summary.at("mse_lin_2fcv")},
            {"lin oracle", res.summary.at("mse_lin_oracle")},
            {"non 2fcv", res.summary.at("mse_non_2fcv")},
            {"non oracle", res.summary.at("mse_non_oracle")},
        };
        const std::string title = o.function + " n=" + std::to_string(o.n) +
                                  " sigma2=" + fmt17(o.sigma2);
        write_boxplot_svg(out, title, "mse", groups);
        finish_file(out, path);
    }
    std::cout << "wrote " << o.outdir << "/records.csv, summary.json, boxplot.svg ("
              << res.records.size() << " replications)\n";
    return 0;
}

int cmd_rate(const Options& o) {
    const ModelConfig mc = model_from(o);
    const EstimatorConfig ec = estimator_from(o);

    RateStudyConfig rc;
    rc.r = mc.r;
    rc.n_list = parse_n_list(o.n_list);
    rc.replications = o.replications;
    rc.s_prime = o.s_prime;
    if (o.rule == "theorem") rc.rule = RateRule::theorem;
    else if (o.rule == "cv") rc.rule = RateRule::cv;
    else throw validation_error("--rule must be theorem or cv");

    const RateStudyResult res = rate_study(rc, mc, ec, o.threads);

    ConfigEcho echo = echo_common("rate", o, true);
    echo.push_back({"n_list", o.n_list});
    echo.push_back({"N", std::to_string(o.replications)});
    echo.push_back({"s_prime", fmt17(o.s_prime)});
    echo.push_back({"rule", o.rule});

    {
        const std::string path = o.outdir + "/rate.csv";
        std::ofstream out = open_output(path);
        write_rate_csv(res, echo, out);
        finish_file(out, path);
    }
    {
        const std::string path = o.outdir + "/rate.svg";
        std::ofstream out = open_output(path);
        write_rate_svg(out, o.function + " error against sample size", res);
        finish_file(out, path);
    }
    std::cout << "slope=" << fmt17(res.slope) << "\n";
    return 0;
}

void add_model_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--function", o.function,
                    "target from the catalog: blip, ramp or parabolas")
        ->capture_default_str();
    cmd->add_option("--n", o.n, "sample size (power of two in 2^8..2^20)")
        ->capture_default_str();
    cmd->add_option("--sigma2", o.sigma2, "additive noise variance")
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "master seed")->capture_default_str();
    cmd->add_option("--u-law", o.u_law,
                    "multiplicative noise law: uniform, gaussian or one")
        ->capture_default_str();
    cmd->add_flag("--u-standardize,!--no-u-standardize", o.u_standardize,
                  "rescale U to unit second moment");
    cmd->add_option("--noise-mode", o.noise_mode,
                    "additive noise: a5 (random, variance sigma2) or a6 "
                    "(known function g)")
        ->capture_default_str();
    cmd->add_option("--g", o.g_spec,
                    "known additive function under a6: const:<v> or sine:<amp>");
    cmd->add_option("--outdir", o.outdir, "directory receiving the artifacts")
        ->capture_default_str();
    cmd->add_option("--config", o.config_path,
                    "flat key=value configuration file; flags override it");
}

std::string trimmed(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

// key=value lines become --key=value tokens; '#' starts a comment line
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file '" + path + "'");
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        line = trimmed(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error("config line is not key=value: '" + line + "'");
        const std::string key = trimmed(line.substr(0, eq));
        const std::string value = trimmed(line.substr(eq + 1));
        if (key.empty())
            throw validation_error("config line has an empty key: '" + line + "'");
        if (key == "config")
            throw validation_error("config files cannot reference other config files");
        tokens.push_back("--" + key + "=" + value);
    }
    return tokens;
}

// Loads the file named by a --config flag and splices its tokens in right
// after the subcommand name, so explicit flags (parsed later under the
// take-last policy) override the file. Unknown keys are rejected here with
// the subcommand's flag list as the reference.
void splice_config(const CLI::App& app, std::vector<std::string>& args) {
    if (args.empty() || args[0].empty() || args[0][0] == '-') return;
    const CLI::App* sub = nullptr;
    for (const CLI::App* candidate : app.get_subcommands(nullptr))
        if (candidate->check_name(args[0])) sub = candidate;
    if (sub == nullptr) return; // CLI11 reports the unknown subcommand itself

    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(std::string("--config=").size());
    }
    if (path.empty()) return;

    const std::vector<std::string> tokens = config_tokens(path);
    for (const std::string& token : tokens) {
        const std::string name = token.substr(0, token.find('='));
        if (sub->get_option_no_throw(name) == nullptr)
            throw validation_error("config key '" + name.substr(2) +
                                   "' is not a flag of " + sub->get_name());
    }
    args.insert(args.begin() + 1, tokens.begin(), tokens.end());
}

void add_estimator_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--wavelet", o.wavelet,
                    "Daubechies filter order (vanishing moments, 1..10)")
        ->capture_default_str();
    cmd->add_option("--j1", o.j1, "finest detail level; -1 means log2(n)-1")
        ->capture_default_str();
    cmd->add_option("--kappa", o.kappa, "universal threshold constant")
        ->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavelet estimation of a squared regression function under "
                 "multiplicative and additive noise"};
    app.require_subcommand(1);
    // a later occurrence of a flag wins, so config-file tokens spliced in
    // front of the explicit flags are overridden by them
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    Options sim, est, mco, rat;
    mco.replications = 100; // boxplot default
    rat.replications = 50;  // rate-study default

    CLI::App* s = app.add_subcommand(
        "simulate", "draw a design sample and write it as CSV");
    add_model_flags(s, sim);

    CLI::App* e = app.add_subcommand(
        "estimate", "reconstruct the squared regression function from one sample");
    add_model_flags(e, est);
    add_estimator_flags(e, est);
    e->add_option("--jstar", est.jstar,
                  "truncation level; -1 selects it by two-fold cross validation")
        ->capture_default_str();
    e->add_option("--threshold", est.threshold,
                  "detail threshold: cv, universal or a number")
        ->capture_default_str();
    e->add_option("--method", est.method, "linear, nonlinear or both")
        ->capture_default_str();
    e->add_option("--input", est.input,
                  "sample CSV to load instead of generating one");

    CLI::App* m = app.add_subcommand(
        "mc", "Monte Carlo replications with records, summary and boxplot");
    add_model_flags(m, mco);
    add_estimator_flags(m, mco);
    m->add_option("--N", mco.replications, "number of replications")
        ->capture_default_str();
    m->add_option("--threads", mco.threads, "worker threads; 0 picks automatically")
        ->capture_default_str();

    CLI::App* r = app.add_subcommand(
        "rate", "Monte Carlo error of the linear estimator along a grid of n");
    add_model_flags(r, rat);
    add_estimator_flags(r, rat);
    r->add_option("--n-list", rat.n_list,
                  "comma-separated sample sizes, at least three, increasing")
        ->capture_default_str();
    r->add_option("--N", rat.replications, "replications per sample size")
        ->capture_default_str();
    r->add_option("--s-prime", rat.s_prime,
                  "effective smoothness driving the tuned level and the "
                  "reference slope")
        ->capture_default_str();
    r->add_option("--rule", rat.rule,
                  "level rule: theorem (tuned from s-prime) or cv (per sample)")
        ->capture_default_str();
    r->add_option("--threads", rat.threads, "worker threads; 0 picks automatically")
        ->capture_default_str();

    try {
        std::vector<std::string> args;
        args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
        for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
        splice_config(app, args);
        std::reverse(args.begin(), args.end()); // the vector overload pops from the back
        app.parse(args);
    } catch (const CLI::CallForHelp& err) {
        return app.exit(err);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return 2;
    } catch (const validation_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const io_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 3;
    }

    try {
        if (s->parsed()) return cmd_simulate(sim);
        if (e->parsed()) return cmd_estimate(est);
        if (m->parsed()) return cmd_mc(mco);
        if (r->parsed()) return cmd_rate(rat);
    } catch (const validation_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const io_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 3;
    } catch (const numerical_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 4;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
