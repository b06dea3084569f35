#pragma once

#include "wavesq/harness.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace wavesq {

// Self-contained SVG writers (no external renderer, fixed deterministic
// formatting so reruns are byte-identical).

// One box-and-whisker glyph per labeled five-number summary.
void write_boxplot_svg(std::ostream& out, const std::string& title,
                       const std::string& y_label,
                       const std::vector<std::pair<std::string, FiveNumber>>& groups);

// log-log scatter of MISE against n with the fitted slope line.
void write_rate_svg(std::ostream& out, const std::string& title,
                    const RateStudyResult& result);

} // namespace wavesq
