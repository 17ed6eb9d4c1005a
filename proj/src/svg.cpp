#include "dlasso/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dlasso/errors.hpp"

namespace dlasso {

namespace {

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void pad() {
        if (!(hi > lo)) {
            lo -= 1.0;
            hi += 1.0;
        }
        const double m = 0.05 * (hi - lo);
        lo -= m;
        hi += m;
    }
};

std::string trim_num(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

}  // namespace

void write_svg_plot(const std::filesystem::path& path, const SvgPlot& plot) {
    Range rx, ry;
    for (const auto& s : plot.series) {
        for (double v : s.x) rx.add(v);
        for (double v : s.y) ry.add(v);
    }
    if (!std::isfinite(rx.lo) || !std::isfinite(ry.lo))
        throw BadConfig("svg plot has no finite data");
    rx.pad();
    ry.pad();

    const double ml = 70, mr = 20, mt = 40, mb = 50;
    const double pw = plot.width - ml - mr, ph = plot.height - mt - mb;
    auto sx = [&](double v) { return ml + pw * (v - rx.lo) / (rx.hi - rx.lo); };
    auto sy = [&](double v) { return mt + ph * (1.0 - (v - ry.lo) / (ry.hi - ry.lo)); };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width
        << "\" height=\"" << plot.height << "\" viewBox=\"0 0 " << plot.width << ' '
        << plot.height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << plot.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << plot.title << "</text>\n";

    // axes with 5 ticks each
    out << "<g stroke=\"black\" fill=\"none\"><path d=\"M" << ml << ' ' << mt << " V"
        << mt + ph << " H" << ml + pw << "\"/></g>\n";
    for (int t = 0; t <= 4; ++t) {
        const double fx = rx.lo + (rx.hi - rx.lo) * t / 4.0;
        const double fy = ry.lo + (ry.hi - ry.lo) * t / 4.0;
        out << "<line x1=\"" << sx(fx) << "\" y1=\"" << mt + ph << "\" x2=\"" << sx(fx)
            << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << sx(fx) << "\" y=\"" << mt + ph + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << trim_num(fx) << "</text>\n";
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << sy(fy) << "\" x2=\"" << ml
            << "\" y2=\"" << sy(fy) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << sy(fy) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << trim_num(fy) << "</text>\n";
    }
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << plot.height - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << plot.x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 16 " << mt + ph / 2 << ")\">" << plot.y_label
        << "</text>\n";

    static const char* fallback[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    int ci = 0;
    double ly = mt + 8;
    for (const auto& s : plot.series) {
        const std::string color =
            s.color.empty() ? fallback[ci % 5] : s.color;
        ++ci;
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            out << sx(s.x[i]) << ',' << sy(s.y[i]) << ' ';
        out << "\"/>\n";
        out << "<line x1=\"" << ml + pw - 130 << "\" y1=\"" << ly << "\" x2=\"" << ml + pw - 110
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << ml + pw - 104 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
        ly += 16;
    }
    out << "</svg>\n";
}

}  // namespace dlasso
