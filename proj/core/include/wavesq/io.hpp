#pragma once

#include "wavesq/estimator.hpp"
#include "wavesq/harness.hpp"
#include "wavesq/model.hpp"

#include <fstream>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace wavesq {

// key=value pairs echoed into every artifact header ('#' comment lines in
// CSV, an "config" object in JSON) so each output names the run that made it.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

// Opens for writing, throwing io_error instead of returning a bad stream.
std::ofstream open_output(const std::string& path);

void write_config_echo(const ConfigEcho& echo, std::ostream& out);

// x,y rows.
void write_sample_csv(const DesignSample& sample, const ConfigEcho& echo,
                      std::ostream& out);

// grid,value rows; optional extra columns for a second estimate and for the
// true function, when present.
void write_estimate_csv(const Estimate& linear, const Estimate* nonlinear,
                        const TestFunction* true_r, const ConfigEcho& echo,
                        std::ostream& out);

// One row per replication, columns exactly the ReplicationRecord fields.
void write_records_csv(const std::vector<ReplicationRecord>& records,
                       const ConfigEcho& echo, std::ostream& out);

// Five-number summaries keyed by metric, with the run configuration inlined.
void write_summary_json(const SummaryMap& summary, const ConfigEcho& echo,
                        std::ostream& out);

// n,j_star,mise_mean,mise_se,mse_mean rows plus slope metadata in the echo.
void write_rate_csv(const RateStudyResult& result, const ConfigEcho& echo,
                    std::ostream& out);

} // namespace wavesq
