#pragma once

#include "chartforge/geometry.hpp"
#include "chartforge/mask.hpp"
#include "chartforge/raster.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string_view>
#include <vector>

namespace chartforge::eval {

/// Per-column row of the central axis; nullopt where the column is empty.
struct AxisTrace {
    std::vector<std::optional<double>> y_of_x;
    int height = 0;

    std::size_t defined_count() const;
};

enum class MetricKind { height, trend, angle, size };
std::string_view to_string(MetricKind kind);

/// For trend reports one entry per window; for mark reports one entry per
/// mark, spanning the mark's columns.
struct WindowScore {
    int index = 0;
    int x_start = 0;
    int x_end = 0;
    double score = 1.0;
    /// False for windows where the reference has no trace; they score 1 and
    /// are left out of the global mean.
    bool active = true;
};

struct DistortionReport {
    double global_score = 1.0;
    std::vector<WindowScore> windows;
    std::vector<Rect> error_boxes;
    MetricKind metric_kind = MetricKind::trend;
};

nlohmann::json to_json(const DistortionReport& report);

struct EvalConfig {
    double window_fraction = 0.05; // window width as a share of canvas width
    int smooth_k = 5;
    double error_threshold = 0.9; // scores strictly below are flagged
    int mask_dilation = 6;        // background path
    int box_margin = 4;           // vertical padding of trend error boxes
};

/// Foreground pixels: alpha >= 128 when the image has transparency, else
/// colour differing from the top-left pixel by more than 48 (sum of absolute
/// channel differences).
BinaryMask foreground(const RasterImage& image);

/// Mean foreground row per column. Throws EmptyForeground.
AxisTrace extract_axis(const RasterImage& image);
AxisTrace extract_axis(const BinaryMask& foreground);

/// Width-k moving average with edge clamping; absent samples are skipped and
/// stay absent. Throws InvalidArgument unless k is odd and >= 1.
AxisTrace box_smooth(const AxisTrace& trace, int k);

/// Row value mapped so row 0 is 255 and the bottom row 0.
double profile_value(double row, int height);

int window_width(int canvas_width, const EvalConfig& config = {});

/// Windowed comparison of two traces on a canvas of the given width: per
/// window S = 1 - |mean reference profile - mean generated profile| / 255.
/// A window where only the generated trace is absent scores 0.
DistortionReport score_traces(const AxisTrace& reference, const AxisTrace& generated, int canvas_width,
                              const EvalConfig& config = {});

/// Smoothed central-axis comparison of a chart raster and a generated one.
/// Throws SizeMismatch or EmptyForeground.
DistortionReport trend_score(const RasterImage& chart, const RasterImage& generated, const EvalConfig& config = {});

/// Per-mark height (bar), angular extent (pie) or area-equivalent radius
/// (scatter), measured on `generated` and on the geometry's own rasterization
/// with the same probe. Score = 1 - |measured - expected| / expected, clamped.
/// Throws MarkNotFound, SizeMismatch, InvalidArgument (line charts).
DistortionReport mark_metric_score(const chart::ChartGeometry& geometry, const RasterImage& generated,
                                   const EvalConfig& config = {});

/// Sobel edges at Otsu's level, restricted to the dilated chart mask, traced
/// by topmost edge row and compared with the mask's top boundary.
/// Throws NoEdgesFound or SizeMismatch.
DistortionReport background_score(const chart::ChartMask& mask, const RasterImage& generated,
                                  const EvalConfig& config = {});

/// Line charts go through trend_score against the plain render, the others
/// through mark_metric_score.
DistortionReport evaluate(const chart::ChartGeometry& geometry, const RasterImage& generated,
                          const EvalConfig& config = {});

} // namespace chartforge::eval
