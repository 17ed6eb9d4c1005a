#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace dlasso {

// Minimal line-plot writer. Plots are convenience output; the CSV next to
// them is the contract.
struct SvgSeries {
    std::string label;
    std::string color;  // e.g. "#1f77b4"
    std::vector<double> x;
    std::vector<double> y;
};

struct SvgPlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 720;
    int height = 480;
    std::vector<SvgSeries> series;
};

void write_svg_plot(const std::filesystem::path& path, const SvgPlot& plot);

}  // namespace dlasso
