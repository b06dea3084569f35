#include "wavesq/io.hpp"

#include "wavesq/errors.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <ostream>

namespace wavesq {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // binary: no newline surprises
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    return out;
}

void write_config_echo(const ConfigEcho& echo, std::ostream& out) {
    for (const auto& [key, value] : echo) out << "# " << key << "=" << value << "\n";
}

void write_sample_csv(const DesignSample& sample, const ConfigEcho& echo,
                      std::ostream& out) {
    write_config_echo(echo, out);
    out << "x,y\n";
    for (std::size_t i = 0; i < sample.x.size(); ++i)
        out << fmt(sample.x[i]) << "," << fmt(sample.y[i]) << "\n";
}

void write_estimate_csv(const Estimate& linear, const Estimate* nonlinear,
                        const TestFunction* true_r, const ConfigEcho& echo,
                        std::ostream& out) {
    write_config_echo(echo, out);
    out << "grid,linear";
    if (nonlinear) out << ",nonlinear";
    if (true_r) out << ",true_r";
    out << "\n";
    for (std::size_t i = 0; i < linear.grid.size(); ++i) {
        out << fmt(linear.grid[i]) << "," << fmt(linear.values[i]);
        if (nonlinear) out << "," << fmt(nonlinear->values[i]);
        if (true_r) out << "," << fmt((*true_r)(linear.grid[i]));
        out << "\n";
    }
}

void write_records_csv(const std::vector<ReplicationRecord>& records,
                       const ConfigEcho& echo, std::ostream& out) {
    write_config_echo(echo, out);
    out << "replication_index,seed,mse_lin_2fcv,mse_lin_oracle,mse_non_2fcv,"
           "mse_non_oracle,jstar_2fcv,jstar_oracle,threshold_2fcv,"
           "kept_detail_count,mise_lin_2fcv,mise_lin_oracle,mise_non_2fcv,"
           "mise_non_oracle\n";
    for (const ReplicationRecord& r : records) {
        out << r.replication_index << "," << r.seed << ","
            << fmt(r.mse_lin_2fcv) << "," << fmt(r.mse_lin_oracle) << ","
            << fmt(r.mse_non_2fcv) << "," << fmt(r.mse_non_oracle) << ","
            << r.jstar_2fcv << "," << r.jstar_oracle << ","
            << fmt(r.threshold_2fcv) << "," << r.kept_detail_count << ","
            << fmt(r.mise_lin_2fcv) << "," << fmt(r.mise_lin_oracle) << ","
            << fmt(r.mise_non_2fcv) << "," << fmt(r.mise_non_oracle) << "\n";
    }
}

void write_summary_json(const SummaryMap& summary, const ConfigEcho& echo,
                        std::ostream& out) {
    nlohmann::ordered_json doc;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto& [key, value] : echo) config[key] = value;
    doc["config"] = config;
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
    for (const auto& [name, five] : summary) {
        metrics[name] = {{"min", five.min},
                         {"q1", five.q1},
                         {"median", five.median},
                         {"q3", five.q3},
                         {"max", five.max}};
    }
    doc["metrics"] = metrics;
    out << doc.dump(2) << "\n";
}

void write_rate_csv(const RateStudyResult& result, const ConfigEcho& echo,
                    std::ostream& out) {
    write_config_echo(echo, out);
    out << "# slope=" << fmt(result.slope) << "\n";
    out << "# slope_se=" << fmt(result.slope_se) << "\n";
    out << "# theoretical_slope=" << fmt(result.theoretical_slope) << "\n";
    out << "n,j_star,mise_mean,mise_se,mse_mean\n";
    for (const RatePoint& p : result.points) {
        out << p.n << "," << p.j_star << "," << fmt(p.mise_mean) << ","
            << fmt(p.mise_se) << "," << fmt(p.mse_mean) << "\n";
    }
}

} // namespace wavesq
