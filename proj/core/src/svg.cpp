#include "wavesq/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace wavesq {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// largest of 1/2/5 * 10^k not exceeding a ~5-tick spacing
double nice_step(double range) {
    const double raw = range / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double frac = raw / mag;
    double nice = 10.0;
    if (frac <= 1.0)
        nice = 1.0;
    else if (frac <= 2.0)
        nice = 2.0;
    else if (frac <= 5.0)
        nice = 5.0;
    return nice * mag;
}

struct Frame {
    double width = 640.0, height = 420.0;
    double left = 70.0, right = 20.0, top = 45.0, bottom = 55.0;

    double plot_w() const { return width - left - right; }
    double plot_h() const { return height - top - bottom; }
};

void open_svg(std::ostream& out, const Frame& f, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(f.width)
        << "\" height=\"" << num(f.height) << "\" viewBox=\"0 0 "
        << num(f.width) << " " << num(f.height) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    out << "<text x=\"" << num(f.width / 2) << "\" y=\"24\" fill=\"#222222\" "
           "font-family=\"sans-serif\" font-size=\"15\" "
           "text-anchor=\"middle\">"
        << title << "</text>\n";
}

void axes_box(std::ostream& out, const Frame& f) {
    out << "<rect x=\"" << num(f.left) << "\" y=\"" << num(f.top)
        << "\" width=\"" << num(f.plot_w()) << "\" height=\"" << num(f.plot_h())
        << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
}

void y_tick(std::ostream& out, const Frame& f, double py,
            const std::string& text) {
    out << "<line x1=\"" << num(f.left) << "\" y1=\"" << num(py) << "\" x2=\""
        << num(f.width - f.right) << "\" y2=\"" << num(py)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << num(f.left - 6) << "\" y=\"" << num(py + 4)
        << "\" fill=\"#333333\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"end\">"
        << text << "</text>\n";
}

} // namespace

void write_boxplot_svg(std::ostream& out, const std::string& title,
                       const std::string& y_label,
                       const std::vector<std::pair<std::string, FiveNumber>>& groups) {
    Frame f;
    open_svg(out, f, title);

    double y_max = 0.0;
    for (const auto& [name, five] : groups) y_max = std::max(y_max, five.max);
    if (y_max <= 0.0) y_max = 1.0;
    y_max *= 1.08;

    const auto to_py = [&](double v) {
        return f.top + f.plot_h() * (1.0 - v / y_max);
    };

    const double step = nice_step(y_max);
    for (double v = 0.0; v <= y_max + 1e-12 * y_max; v += step)
        y_tick(out, f, to_py(v), label_num(v));
    axes_box(out, f);

    out << "<text x=\"16\" y=\"" << num(f.top + f.plot_h() / 2)
        << "\" fill=\"#333333\" font-family=\"sans-serif\" font-size=\"12\" "
           "text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << num(f.top + f.plot_h() / 2) << ")\">" << y_label << "</text>\n";

    const double slot = f.plot_w() / static_cast<double>(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const FiveNumber& five = groups[g].second;
        const double cx = f.left + slot * (static_cast<double>(g) + 0.5);
        const double half = 0.22 * slot;
        // whiskers with caps
        for (const auto& [a, b] : {std::pair{five.min, five.q1},
                                   std::pair{five.q3, five.max}}) {
            out << "<line x1=\"" << num(cx) << "\" y1=\"" << num(to_py(a))
                << "\" x2=\"" << num(cx) << "\" y2=\"" << num(to_py(b))
                << "\" stroke=\"#35507a\" stroke-width=\"1.2\"/>\n";
        }
        for (double v : {five.min, five.max}) {
            out << "<line x1=\"" << num(cx - half * 0.6) << "\" y1=\""
                << num(to_py(v)) << "\" x2=\"" << num(cx + half * 0.6)
                << "\" y2=\"" << num(to_py(v))
                << "\" stroke=\"#35507a\" stroke-width=\"1.2\"/>\n";
        }
        // interquartile box and median
        out << "<rect x=\"" << num(cx - half) << "\" y=\"" << num(to_py(five.q3))
            << "\" width=\"" << num(2 * half) << "\" height=\""
            << num(to_py(five.q1) - to_py(five.q3))
            << "\" fill=\"#dbe6f4\" stroke=\"#35507a\" stroke-width=\"1.2\"/>\n";
        out << "<line x1=\"" << num(cx - half) << "\" y1=\""
            << num(to_py(five.median)) << "\" x2=\"" << num(cx + half)
            << "\" y2=\"" << num(to_py(five.median))
            << "\" stroke=\"#b03030\" stroke-width=\"1.6\"/>\n";
        out << "<text x=\"" << num(cx) << "\" y=\"" << num(f.height - 34)
            << "\" fill=\"#333333\" font-family=\"sans-serif\" "
               "font-size=\"11\" text-anchor=\"middle\">"
            << groups[g].first << "</text>\n";
    }
    out << "</svg>\n";
}

void write_rate_svg(std::ostream& out, const std::string& title,
                    const RateStudyResult& result) {
    Frame f;
    open_svg(out, f, title);

    const double ln10 = std::log(10.0);
    double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
    for (const RatePoint& p : result.points) {
        const double lx = std::log10(static_cast<double>(p.n));
        const double ly = std::log10(p.mise_mean);
        x_min = std::min(x_min, lx);
        x_max = std::max(x_max, lx);
        y_min = std::min(y_min, ly);
        y_max = std::max(y_max, ly);
    }
    const double x_pad = 0.06 * std::max(x_max - x_min, 0.5);
    const double y_pad = 0.10 * std::max(y_max - y_min, 0.5);
    x_min -= x_pad;
    x_max += x_pad;
    y_min -= y_pad;
    y_max += y_pad;

    const auto to_px = [&](double lx) {
        return f.left + f.plot_w() * (lx - x_min) / (x_max - x_min);
    };
    const auto to_py = [&](double ly) {
        return f.top + f.plot_h() * (1.0 - (ly - y_min) / (y_max - y_min));
    };

    // y ticks: three evenly spaced log positions labeled with the raw value
    for (int t = 0; t <= 3; ++t) {
        const double ly = y_min + (y_max - y_min) * t / 3.0;
        y_tick(out, f, to_py(ly), label_num(std::pow(10.0, ly)));
    }
    axes_box(out, f);

    // x ticks at the sample sizes
    for (const RatePoint& p : result.points) {
        const double px = to_px(std::log10(static_cast<double>(p.n)));
        out << "<line x1=\"" << num(px) << "\" y1=\""
            << num(f.height - f.bottom) << "\" x2=\"" << num(px) << "\" y2=\""
            << num(f.height - f.bottom + 5)
            << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << num(px) << "\" y=\"" << num(f.height - 34)
            << "\" fill=\"#333333\" font-family=\"sans-serif\" "
               "font-size=\"11\" text-anchor=\"middle\">"
            << p.n << "</text>\n";
    }
    out << "<text x=\"" << num(f.left + f.plot_w() / 2) << "\" y=\""
        << num(f.height - 12)
        << "\" fill=\"#333333\" font-family=\"sans-serif\" font-size=\"12\" "
           "text-anchor=\"middle\">sample size n (log scale)</text>\n";
    out << "<text x=\"16\" y=\"" << num(f.top + f.plot_h() / 2)
        << "\" fill=\"#333333\" font-family=\"sans-serif\" font-size=\"12\" "
           "text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << num(f.top + f.plot_h() / 2)
        << ")\">Monte Carlo MISE (log scale)</text>\n";

    // fitted line through the centroid with the estimated slope
    double cx = 0.0, cy = 0.0;
    for (const RatePoint& p : result.points) {
        cx += std::log(static_cast<double>(p.n));
        cy += std::log(p.mise_mean);
    }
    cx /= static_cast<double>(result.points.size());
    cy /= static_cast<double>(result.points.size());
    const auto line_ly = [&](double lx) {
        // same slope in ln-ln and log10-log10 coordinates
        return (cy + result.slope * (lx * ln10 - cx)) / ln10;
    };
    out << "<line x1=\"" << num(to_px(x_min)) << "\" y1=\""
        << num(to_py(line_ly(x_min))) << "\" x2=\"" << num(to_px(x_max))
        << "\" y2=\"" << num(to_py(line_ly(x_max)))
        << "\" stroke=\"#b03030\" stroke-width=\"1.4\" "
           "stroke-dasharray=\"6 3\"/>\n";

    for (const RatePoint& p : result.points) {
        out << "<circle cx=\"" << num(to_px(std::log10(static_cast<double>(p.n))))
            << "\" cy=\"" << num(to_py(std::log10(p.mise_mean)))
            << "\" r=\"3.5\" fill=\"#35507a\"/>\n";
    }

    char note[128];
    std::snprintf(note, sizeof note,
                  "fitted slope %.3f (reference %.3f)", result.slope,
                  result.theoretical_slope);
    out << "<text x=\"" << num(f.width - f.right - 8) << "\" y=\""
        << num(f.top + 16)
        << "\" fill=\"#b03030\" font-family=\"sans-serif\" font-size=\"12\" "
           "text-anchor=\"end\">"
        << note << "</text>\n";
    out << "</svg>\n";
}

} // namespace wavesq
