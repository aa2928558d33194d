#pragma once

#include <string>
#include <vector>

namespace hdfl {

struct PlotOptions {
    /// Plot only these metrics; empty means every metric in the file.
    std::vector<std::string> metrics;
    bool log_x = false;
    bool log_y = false;
    int width = 640;
    int height = 400;
};

/// Renders an experiment CSV (columns experiment,N,metric,value,ci_lo,
/// ci_hi,seeds) as a self-contained SVG line chart with one polyline and CI
/// band per metric. All coordinates are written with 6 significant digits,
/// so identical input bytes give identical output bytes.
std::string plot_experiment_csv(const std::string& csv_text, const PlotOptions& options);

} // namespace hdfl
