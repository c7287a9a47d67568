#pragma once

#include "chartforge/raster.hpp"
#include "chartforge/table.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace chartforge::chart {

enum class ChartType { bar, line, pie, scatter };

std::string_view to_string(ChartType type);
ChartType chart_type_from_string(std::string_view name);

struct AspectRatio {
    int num = 1;
    int den = 1;
    friend bool operator==(const AspectRatio&, const AspectRatio&) = default;
};

struct ChartSpec {
    ChartType chart_type = ChartType::bar;
    std::string x_column;
    std::string y_column;
    std::optional<std::string> size_column; // scatter only
    Size canvas{512, 512};
    AspectRatio aspect_ratio{1, 1};
    /// Overrides the computed plot area (mainly for tests and exact layouts).
    std::optional<Rect> plot_area;

    /// Throws ColumnMissing / InvalidArgument / NegativePieValue when the spec
    /// cannot be applied to `table`.
    void validate(const DataTable& table) const;

    friend bool operator==(const ChartSpec&, const ChartSpec&) = default;
};

/// Fills in x/y columns left empty: x = first non-numeric column (or the
/// first column), y = first numeric column other than x.
ChartSpec with_default_columns(ChartSpec spec, const DataTable& table);

struct PointF {
    double x = 0;
    double y = 0;
    friend bool operator==(const PointF&, const PointF&) = default;
};

/// Bars are snapped to whole pixels so that every rendered bar is exactly its
/// geometric rectangle; `value` keeps the datum.
struct BarRect {
    Rect rect;
    double value = 0;
    friend bool operator==(const BarRect&, const BarRect&) = default;
};

struct LinePolyline {
    std::vector<PointF> points;
    friend bool operator==(const LinePolyline&, const LinePolyline&) = default;
};

/// Angles in radians, pixel coordinates (y down), so increasing angle turns
/// clockwise on screen. start_angle < end_angle.
struct PieSector {
    PointF center;
    double radius = 0;
    double start_angle = 0;
    double end_angle = 0;
    double sweep() const { return end_angle - start_angle; }
    friend bool operator==(const PieSector&, const PieSector&) = default;
};

struct ScatterBubble {
    PointF center;
    double radius = 0;
    friend bool operator==(const ScatterBubble&, const ScatterBubble&) = default;
};

using MarkShape = std::variant<BarRect, LinePolyline, PieSector, ScatterBubble>;

struct Mark {
    MarkShape shape;
    /// Source rows bound to this mark (all rows, in point order, for a polyline).
    std::vector<std::size_t> rows;
    friend bool operator==(const Mark&, const Mark&) = default;
};

struct ChartGeometry {
    ChartType type = ChartType::bar;
    Size canvas;
    Rect plot_area;
    /// Pixel row of the zero line for bars; plot bottom otherwise.
    int baseline_y = 0;
    double line_width = 6.0;
    /// Minimum and maximum data values mapped to the plot's vertical extent.
    double y_min = 0;
    double y_max = 1;
    std::vector<Mark> marks;

    /// Pixel bounds of mark `i` (clipped to the canvas).
    Rect mark_bounds(std::size_t i) const;

    friend bool operator==(const ChartGeometry&, const ChartGeometry&) = default;
};

/// Lays out marks for the four supported chart types. Bars, line points and
/// bubbles are ordered by x (input order for categorical x); pie sectors follow
/// input order starting at 12 o'clock. Bubble radius grows with sqrt(size) so
/// that area encodes the value.
ChartGeometry derive_geometry(const DataTable& table, const ChartSpec& spec);

/// Plot area used when the spec does not override it: the canvas is padded to
/// the requested aspect ratio, then inset for axes and title.
Rect default_plot_area(Size canvas, AspectRatio aspect);

} // namespace chartforge::chart
