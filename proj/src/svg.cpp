#include "hdfl/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "hdfl/errors.hpp"

namespace hdfl {

namespace {

// 6 significant digits; fixed precision keeps golden files stable.
std::string fmt6(double v) {
    char buf[48];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
    (void)ec;
    return std::string(buf, ptr);
}

struct SeriesPoint {
    double x = 0.0;
    double y = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

} // namespace

std::string plot_experiment_csv(const std::string& csv_text, const PlotOptions& options) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line)) throw data_error("plot: empty CSV");
    if (split_csv_line(line).size() != 7)
        throw data_error("plot: expected header experiment,N,metric,value,ci_lo,ci_hi,seeds");

    std::map<std::string, std::vector<SeriesPoint>> series;
    std::vector<std::string> order; // first-seen metric order
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 7) throw data_error("plot: malformed CSV row: " + line);
        const std::string& metric = f[2];
        if (!options.metrics.empty() &&
            std::find(options.metrics.begin(), options.metrics.end(), metric) ==
                options.metrics.end())
            continue;
        SeriesPoint p;
        try {
            p.x = std::stod(f[1]);
            p.y = std::stod(f[3]);
            p.lo = std::stod(f[4]);
            p.hi = std::stod(f[5]);
        } catch (const std::exception&) {
            throw data_error("plot: non-numeric CSV row: " + line);
        }
        if (options.log_x && p.x <= 0.0) continue; // aggregate rows such as slopes
        if (options.log_y && (p.y <= 0.0 || p.lo <= 0.0 || p.hi <= 0.0)) continue;
        if (options.log_x) p.x = std::log10(p.x);
        if (options.log_y) {
            p.y = std::log10(p.y);
            p.lo = std::log10(p.lo);
            p.hi = std::log10(p.hi);
        }
        if (series.find(metric) == series.end()) order.push_back(metric);
        series[metric].push_back(p);
    }
    for (const std::string& wanted : options.metrics)
        if (series.find(wanted) == series.end())
            throw data_error("plot: unknown metric: " + wanted);
    if (series.empty()) throw data_error("plot: no data rows to plot");

    double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
    bool first = true;
    for (auto& [name, points] : series) {
        std::sort(points.begin(), points.end(),
                  [](const SeriesPoint& a, const SeriesPoint& b) { return a.x < b.x; });
        for (const SeriesPoint& p : points) {
            if (first) {
                x_min = x_max = p.x;
                y_min = p.lo;
                y_max = p.hi;
                first = false;
            }
            x_min = std::min(x_min, p.x);
            x_max = std::max(x_max, p.x);
            y_min = std::min(y_min, p.lo);
            y_max = std::max(y_max, p.hi);
        }
    }
    if (x_max == x_min) {
        x_min -= 1.0;
        x_max += 1.0;
    }
    if (y_max == y_min) {
        y_min -= 1.0;
        y_max += 1.0;
    }
    const double x_pad = 0.05 * (x_max - x_min);
    const double y_pad = 0.05 * (y_max - y_min);
    x_min -= x_pad;
    x_max += x_pad;
    y_min -= y_pad;
    y_max += y_pad;

    const double width = options.width;
    const double height = options.height;
    const double left = 64.0, right = 16.0, top = 16.0, bottom = 44.0;
    auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * (width - left - right); };
    auto sy = [&](double y) {
        return height - bottom - (y - y_min) / (y_max - y_min) * (height - top - bottom);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
        << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height
        << "\">\n";
    svg << "<rect width=\"" << options.width << "\" height=\"" << options.height
        << "\" fill=\"white\"/>\n";

    // Axes and ticks.
    svg << "<g stroke=\"#333333\" stroke-width=\"1\">\n";
    svg << "<line x1=\"" << fmt6(left) << "\" y1=\"" << fmt6(height - bottom) << "\" x2=\""
        << fmt6(width - right) << "\" y2=\"" << fmt6(height - bottom) << "\"/>\n";
    svg << "<line x1=\"" << fmt6(left) << "\" y1=\"" << fmt6(top) << "\" x2=\"" << fmt6(left)
        << "\" y2=\"" << fmt6(height - bottom) << "\"/>\n";
    svg << "</g>\n";
    svg << "<g font-family=\"monospace\" font-size=\"11\" fill=\"#333333\">\n";
    for (int t = 0; t <= 4; ++t) {
        const double fx = x_min + (x_max - x_min) * t / 4.0;
        const double fy = y_min + (y_max - y_min) * t / 4.0;
        svg << "<line x1=\"" << fmt6(sx(fx)) << "\" y1=\"" << fmt6(height - bottom) << "\" x2=\""
            << fmt6(sx(fx)) << "\" y2=\"" << fmt6(height - bottom + 4) << "\" stroke=\"#333333\"/>\n";
        svg << "<text x=\"" << fmt6(sx(fx)) << "\" y=\"" << fmt6(height - bottom + 16)
            << "\" text-anchor=\"middle\">" << fmt6(fx) << "</text>\n";
        svg << "<line x1=\"" << fmt6(left - 4) << "\" y1=\"" << fmt6(sy(fy)) << "\" x2=\""
            << fmt6(left) << "\" y2=\"" << fmt6(sy(fy)) << "\" stroke=\"#333333\"/>\n";
        svg << "<text x=\"" << fmt6(left - 8) << "\" y=\"" << fmt6(sy(fy) + 4)
            << "\" text-anchor=\"end\">" << fmt6(fy) << "</text>\n";
    }
    const std::string x_label = options.log_x ? "log10 N" : "N";
    const std::string y_label = options.log_y ? "log10 value" : "value";
    svg << "<text x=\"" << fmt6(0.5 * (left + width - right)) << "\" y=\"" << fmt6(height - 8)
        << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    svg << "<text x=\"14\" y=\"" << fmt6(0.5 * (top + height - bottom))
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << fmt6(0.5 * (top + height - bottom)) << ")\">" << y_label << "</text>\n";
    svg << "</g>\n";

    // CI bands then lines, in first-seen metric order.
    int color = 0;
    for (const std::string& name : order) {
        const std::vector<SeriesPoint>& points = series[name];
        const char* stroke = kPalette[color % 6];
        if (points.size() >= 2) {
            svg << "<polygon fill=\"" << stroke << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
            for (const SeriesPoint& p : points) svg << fmt6(sx(p.x)) << ',' << fmt6(sy(p.hi)) << ' ';
            for (auto it = points.rbegin(); it != points.rend(); ++it)
                svg << fmt6(sx(it->x)) << ',' << fmt6(sy(it->lo)) << ' ';
            svg << "\"/>\n";
        }
        svg << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
        for (const SeriesPoint& p : points) svg << fmt6(sx(p.x)) << ',' << fmt6(sy(p.y)) << ' ';
        svg << "\"/>\n";
        for (const SeriesPoint& p : points)
            svg << "<circle cx=\"" << fmt6(sx(p.x)) << "\" cy=\"" << fmt6(sy(p.y))
                << "\" r=\"2.5\" fill=\"" << stroke << "\"/>\n";
        svg << "<text font-family=\"monospace\" font-size=\"11\" fill=\"" << stroke << "\" x=\""
            << fmt6(width - right - 8) << "\" y=\"" << fmt6(top + 14 + 14 * color)
            << "\" text-anchor=\"end\">" << name << "</text>\n";
        ++color;
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace hdfl
