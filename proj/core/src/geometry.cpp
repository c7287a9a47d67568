#include "chartforge/geometry.hpp"

#include "chartforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace chartforge::chart {
namespace {

constexpr double kBarFill = 0.7;
constexpr double kLinePad = 0.05;
constexpr double kScatterPad = 0.08;
constexpr double kBubbleMaxFraction = 0.08;
constexpr double kPieRadiusFraction = 0.45;

std::size_t require_column(const DataTable& table, const std::string& name, std::string_view role) {
    auto idx = table.column_index(name);
    if (!idx) throw Error(ErrorCode::ColumnMissing, std::string(role) + " column \"" + name + "\" not found");
    return *idx;
}

std::size_t require_numeric(const DataTable& table, const std::string& name, std::string_view role) {
    const std::size_t idx = require_column(table, name, role);
    if (table.columns[idx].kind != ColumnKind::numeric)
        throw Error(ErrorCode::InvalidArgument, std::string(role) + " column \"" + name + "\" must be numeric");
    return idx;
}

// Row order for x-ordered marks: ascending numeric x, input order otherwise.
std::vector<std::size_t> x_order(const DataTable& table, std::size_t x_col) {
    std::vector<std::size_t> order(table.row_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (table.columns[x_col].kind == ColumnKind::numeric) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return table.number(a, x_col) < table.number(b, x_col); });
    }
    return order;
}

// Horizontal positions for x-ordered marks: a linear scale over numeric x,
// evenly spaced slot centres otherwise.
std::vector<double> x_positions(const DataTable& table, std::size_t x_col, const std::vector<std::size_t>& order,
                                const Rect& plot, double pad) {
    std::vector<double> xs;
    const std::size_t n = order.size();
    if (table.columns[x_col].kind == ColumnKind::numeric) {
        const double lo = table.number(order.front(), x_col);
        const double hi = table.number(order.back(), x_col);
        for (std::size_t r : order) {
            if (hi == lo) {
                xs.push_back(plot.x + plot.w / 2.0);
                continue;
            }
            const double t = (table.number(r, x_col) - lo) / (hi - lo);
            xs.push_back(plot.x + plot.w * (pad + (1.0 - 2.0 * pad) * t));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) xs.push_back(plot.x + plot.w * (i + 0.5) / static_cast<double>(n));
    }
    return xs;
}

} // namespace

std::string_view to_string(ChartType type) {
    switch (type) {
    case ChartType::bar: return "bar";
    case ChartType::line: return "line";
    case ChartType::pie: return "pie";
    case ChartType::scatter: return "scatter";
    }
    return "bar";
}

ChartType chart_type_from_string(std::string_view name) {
    if (name == "bar") return ChartType::bar;
    if (name == "line") return ChartType::line;
    if (name == "pie") return ChartType::pie;
    if (name == "scatter") return ChartType::scatter;
    throw Error(ErrorCode::InvalidArgument, "unknown chart type \"" + std::string(name) + "\"");
}

void ChartSpec::validate(const DataTable& table) const {
    if (canvas.width <= 0 || canvas.height <= 0) throw Error(ErrorCode::InvalidArgument, "canvas must be positive");
    if (aspect_ratio.num <= 0 || aspect_ratio.den <= 0)
        throw Error(ErrorCode::InvalidArgument, "aspect ratio must be positive");
    if (plot_area && (plot_area->empty() || plot_area->x < 0 || plot_area->y < 0 ||
                      plot_area->right() > canvas.width || plot_area->bottom() > canvas.height))
        throw Error(ErrorCode::InvalidArgument, "plot area must lie inside the canvas");
    require_column(table, x_column, "x");
    const std::size_t y = require_numeric(table, y_column, "y");
    if (size_column) {
        if (chart_type != ChartType::scatter)
            throw Error(ErrorCode::InvalidArgument, "size column is only valid for scatter plots");
        require_numeric(table, *size_column, "size");
    }
    if (chart_type == ChartType::scatter) require_numeric(table, x_column, "x");
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        const double v = table.number(r, y);
        if (chart_type == ChartType::pie && v < 0)
            throw Error(ErrorCode::NegativePieValue, "row " + std::to_string(r) + " has negative share " + table.text(r, y));
    }
}

ChartSpec with_default_columns(ChartSpec spec, const DataTable& table) {
    if (spec.x_column.empty()) {
        spec.x_column = table.columns.front().name;
        if (spec.chart_type != ChartType::scatter)
            for (const auto& c : table.columns)
                if (c.kind != ColumnKind::numeric) {
                    spec.x_column = c.name;
                    break;
                }
    }
    if (spec.y_column.empty()) {
        for (const auto& c : table.columns)
            if (c.kind == ColumnKind::numeric && c.name != spec.x_column) {
                spec.y_column = c.name;
                break;
            }
        if (spec.y_column.empty()) spec.y_column = spec.x_column;
    }
    return spec;
}

Rect default_plot_area(Size canvas, AspectRatio aspect) {
    const double want = static_cast<double>(aspect.num) / aspect.den;
    int cw = canvas.width, ch = canvas.height;
    if (static_cast<double>(canvas.width) / canvas.height > want)
        cw = std::max(1, static_cast<int>(std::lround(canvas.height * want)));
    else
        ch = std::max(1, static_cast<int>(std::lround(canvas.width / want)));
    const int cx = (canvas.width - cw) / 2;
    const int cy = (canvas.height - ch) / 2;
    const int left = static_cast<int>(std::lround(0.12 * cw));
    const int right = static_cast<int>(std::lround(0.04 * cw));
    const int top = static_cast<int>(std::lround(0.12 * ch));
    const int bottom = static_cast<int>(std::lround(0.12 * ch));
    return {cx + left, cy + top, std::max(1, cw - left - right), std::max(1, ch - top - bottom)};
}

Rect ChartGeometry::mark_bounds(std::size_t i) const {
    const Rect canvas_rect{0, 0, canvas.width, canvas.height};
    const Mark& m = marks.at(i);
    auto from_extent = [&](double x0, double y0, double x1, double y1) {
        const int ix0 = static_cast<int>(std::floor(x0));
        const int iy0 = static_cast<int>(std::floor(y0));
        const int ix1 = static_cast<int>(std::ceil(x1));
        const int iy1 = static_cast<int>(std::ceil(y1));
        return Rect{ix0, iy0, ix1 - ix0, iy1 - iy0}.intersect(canvas_rect);
    };
    return std::visit(
        [&](const auto& s) -> Rect {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, BarRect>) {
                return s.rect.intersect(canvas_rect);
            } else if constexpr (std::is_same_v<T, LinePolyline>) {
                double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
                for (const auto& p : s.points) {
                    x0 = std::min(x0, p.x);
                    y0 = std::min(y0, p.y);
                    x1 = std::max(x1, p.x);
                    y1 = std::max(y1, p.y);
                }
                const double hw = line_width / 2.0;
                return from_extent(x0 - hw, y0 - hw, x1 + hw, y1 + hw);
            } else if constexpr (std::is_same_v<T, PieSector>) {
                // Bounds of the wedge: centre plus arc extremes.
                double x0 = s.center.x, y0 = s.center.y, x1 = s.center.x, y1 = s.center.y;
                auto include = [&](double a) {
                    const double px = s.center.x + s.radius * std::cos(a);
                    const double py = s.center.y + s.radius * std::sin(a);
                    x0 = std::min(x0, px);
                    y0 = std::min(y0, py);
                    x1 = std::max(x1, px);
                    y1 = std::max(y1, py);
                };
                include(s.start_angle);
                include(s.end_angle);
                const double q = std::numbers::pi / 2;
                for (double a = std::ceil(s.start_angle / q) * q; a < s.end_angle; a += q) include(a);
                return from_extent(x0, y0, x1, y1);
            } else {
                return from_extent(s.center.x - s.radius, s.center.y - s.radius, s.center.x + s.radius,
                                   s.center.y + s.radius);
            }
        },
        m.shape);
}

ChartGeometry derive_geometry(const DataTable& table, const ChartSpec& spec) {
    table.validate();
    spec.validate(table);

    ChartGeometry geo;
    geo.type = spec.chart_type;
    geo.canvas = spec.canvas;
    geo.plot_area = spec.plot_area.value_or(default_plot_area(spec.canvas, spec.aspect_ratio));
    const Rect plot = geo.plot_area;
    geo.baseline_y = plot.bottom();

    const std::size_t x_col = *table.column_index(spec.x_column);
    const std::size_t y_col = *table.column_index(spec.y_column);
    const std::size_t n = table.row_count();

    switch (spec.chart_type) {
    case ChartType::bar: {
        const auto order = x_order(table, x_col);
        double lo = 0.0, hi = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            lo = std::min(lo, table.number(r, y_col));
            hi = std::max(hi, table.number(r, y_col));
        }
        geo.y_min = lo;
        geo.y_max = hi;
        const double px_per_unit = hi > lo ? plot.h / (hi - lo) : 0.0;
        geo.baseline_y = hi > lo ? plot.y + static_cast<int>(std::lround(hi * px_per_unit)) : plot.bottom();
        const double slot = plot.w / static_cast<double>(n);
        const int bar_w = std::max(1, static_cast<int>(std::lround(kBarFill * slot)));
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t r = order[i];
            const double v = table.number(r, y_col);
            const int h = static_cast<int>(std::lround(std::abs(v) * px_per_unit));
            const int x = plot.x + static_cast<int>(std::lround(i * slot + (slot - bar_w) / 2.0));
            const int y = v >= 0 ? geo.baseline_y - h : geo.baseline_y;
            geo.marks.push_back({BarRect{{x, y, bar_w, h}, v}, {r}});
        }
        break;
    }
    case ChartType::line: {
        const auto order = x_order(table, x_col);
        const auto xs = x_positions(table, x_col, order, plot, 0.0);
        double lo = table.number(order.front(), y_col), hi = lo;
        for (std::size_t r : order) {
            lo = std::min(lo, table.number(r, y_col));
            hi = std::max(hi, table.number(r, y_col));
        }
        if (hi == lo) {
            lo -= 1.0;
            hi += 1.0;
        }
        const double pad = (hi - lo) * kLinePad;
        geo.y_min = lo - pad;
        geo.y_max = hi + pad;
        LinePolyline line;
        for (std::size_t i = 0; i < order.size(); ++i) {
            const double t = (table.number(order[i], y_col) - geo.y_min) / (geo.y_max - geo.y_min);
            line.points.push_back({xs[i], plot.bottom() - t * plot.h});
        }
        geo.marks.push_back({std::move(line), order});
        break;
    }
    case ChartType::pie: {
        double total = 0.0;
        for (std::size_t r = 0; r < n; ++r) total += table.number(r, y_col);
        geo.y_min = 0.0;
        geo.y_max = total;
        const PointF center{plot.x + plot.w / 2.0, plot.y + plot.h / 2.0};
        const double radius = kPieRadiusFraction * std::min(plot.w, plot.h);
        const double start = -std::numbers::pi / 2;
        const double full = 2.0 * std::numbers::pi;
        double cumulative = 0.0;
        double angle = start;
        for (std::size_t r = 0; r < n; ++r) {
            // All-zero data degenerates to equal shares.
            cumulative += total > 0 ? table.number(r, y_col) : 1.0;
            const double denom = total > 0 ? total : static_cast<double>(n);
            const double end = r + 1 == n ? start + full : start + full * (cumulative / denom);
            geo.marks.push_back({PieSector{center, radius, angle, end}, {r}});
            angle = end;
        }
        break;
    }
    case ChartType::scatter: {
        const auto order = x_order(table, x_col);
        const auto xs = x_positions(table, x_col, order, plot, kScatterPad);
        double lo = table.number(order.front(), y_col), hi = lo;
        for (std::size_t r : order) {
            lo = std::min(lo, table.number(r, y_col));
            hi = std::max(hi, table.number(r, y_col));
        }
        geo.y_min = lo;
        geo.y_max = hi;
        const double r_max = kBubbleMaxFraction * std::min(plot.w, plot.h);
        std::optional<std::size_t> size_col;
        double size_max = 0.0;
        if (spec.size_column) {
            size_col = table.column_index(*spec.size_column);
            for (std::size_t r = 0; r < n; ++r) {
                const double s = table.number(r, *size_col);
                if (s < 0) throw Error(ErrorCode::InvalidArgument, "row " + std::to_string(r) + " has a negative size");
                size_max = std::max(size_max, s);
            }
        }
        for (std::size_t i = 0; i < order.size(); ++i) {
            const std::size_t r = order[i];
            const double t = hi > lo ? (table.number(r, y_col) - lo) / (hi - lo) : 0.5;
            const double y = plot.bottom() - plot.h * (kScatterPad + (1.0 - 2.0 * kScatterPad) * t);
            double radius = 0.5 * r_max;
            if (size_col) radius = size_max > 0 ? r_max * std::sqrt(table.number(r, *size_col) / size_max) : 0.0;
            geo.marks.push_back({ScatterBubble{{xs[i], y}, radius}, {r}});
        }
        break;
    }
    }
    return geo;
}

} // namespace chartforge::chart
