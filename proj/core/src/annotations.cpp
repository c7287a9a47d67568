#include "chartforge/annotations.hpp"

#include <cmath>
#include <sstream>

namespace chartforge::chart {
namespace {

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// 1, 2 or 5 times a power of ten, about `target` steps across the range.
double nice_step(double range, int target) {
    if (range <= 0) return 1.0;
    const double raw = range / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

} // namespace

std::string export_annotations(const ChartGeometry& g, const DataTable& table, const ChartSpec& spec) {
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << g.canvas.width << "\" height=\"" << g.canvas.height
        << "\" viewBox=\"0 0 " << g.canvas.width << ' ' << g.canvas.height << "\">\n";
    const Rect p = g.plot_area;

    if (table.title)
        svg << "  <text id=\"title\" class=\"title\" x=\"" << g.canvas.width / 2.0 << "\" y=\"" << p.y / 2.0
            << "\" text-anchor=\"middle\" font-size=\"20\">" << xml_escape(*table.title) << "</text>\n";

    const std::size_t x_col = *table.column_index(spec.x_column);

    if (g.type == ChartType::pie) {
        svg << "  <g id=\"labels\">\n";
        for (std::size_t i = 0; i < g.marks.size(); ++i) {
            const auto& s = std::get<PieSector>(g.marks[i].shape);
            const double mid = (s.start_angle + s.end_angle) / 2.0;
            const double lx = s.center.x + 1.12 * s.radius * std::cos(mid);
            const double ly = s.center.y + 1.12 * s.radius * std::sin(mid);
            const std::size_t row = g.marks[i].rows.front();
            svg << "    <text id=\"label-" << i << "\" class=\"slice-label\" x=\"" << fmt(lx) << "\" y=\"" << fmt(ly)
                << "\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(table.text(row, x_col)) << "</text>\n";
        }
        svg << "  </g>\n</svg>\n";
        return svg.str();
    }

    svg << "  <g id=\"axes\" stroke=\"#333\" stroke-width=\"1\">\n"
        << "    <line id=\"x-axis\" class=\"axis\" x1=\"" << p.x << "\" y1=\"" << g.baseline_y << "\" x2=\"" << p.right()
        << "\" y2=\"" << g.baseline_y << "\"/>\n"
        << "    <line id=\"y-axis\" class=\"axis\" x1=\"" << p.x << "\" y1=\"" << p.y << "\" x2=\"" << p.x
        << "\" y2=\"" << p.bottom() << "\"/>\n"
        << "  </g>\n";

    svg << "  <g id=\"x-ticks\">\n";
    std::size_t tick = 0;
    for (const auto& m : g.marks) {
        auto label = [&](double x, std::size_t row) {
            svg << "    <text id=\"x-tick-" << tick++ << "\" class=\"x-tick\" x=\"" << fmt(x) << "\" y=\""
                << p.bottom() + 16 << "\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(table.text(row, x_col))
                << "</text>\n";
        };
        if (const auto* bar = std::get_if<BarRect>(&m.shape)) {
            label(bar->rect.x + bar->rect.w / 2.0, m.rows.front());
        } else if (const auto* line = std::get_if<LinePolyline>(&m.shape)) {
            for (std::size_t i = 0; i < line->points.size(); ++i) label(line->points[i].x, m.rows[i]);
        } else if (const auto* dot = std::get_if<ScatterBubble>(&m.shape)) {
            label(dot->center.x, m.rows.front());
        }
    }
    svg << "  </g>\n";

    // Value ticks along the vertical axis.
    svg << "  <g id=\"y-ticks\">\n";
    const double step = nice_step(g.y_max - g.y_min, 5);
    int index = 0;
    if (g.y_max > g.y_min) {
        for (double v = std::ceil(g.y_min / step) * step; v <= g.y_max + 1e-9 * step; v += step) {
            double y;
            if (g.type == ChartType::scatter) {
                constexpr double pad = 0.08;
                y = p.bottom() - p.h * (pad + (1 - 2 * pad) * (v - g.y_min) / (g.y_max - g.y_min));
            } else {
                y = p.bottom() - p.h * (v - g.y_min) / (g.y_max - g.y_min);
            }
            svg << "    <text id=\"y-tick-" << index++ << "\" class=\"y-tick\" x=\"" << p.x - 6 << "\" y=\"" << fmt(y)
                << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(std::abs(v) < 1e-12 * step ? 0.0 : v)
                << "</text>\n";
        }
    }
    svg << "  </g>\n";
    svg << "</svg>\n";
    return svg.str();
}

} // namespace chartforge::chart
