#pragma once

#include "chartforge/geometry.hpp"
#include "chartforge/raster.hpp"

#include <cstddef>
#include <string_view>

namespace chartforge::chart {

enum class MaskVariant { solid_marks, filled_under_curve, stroke_band, sector_fill, bubble_fill };

std::string_view to_string(MaskVariant v);
MaskVariant mask_variant_from_string(std::string_view name);

/// solid_marks fits every chart type; the rest are tied to one type
/// (filled_under_curve and stroke_band: line, sector_fill: pie, bubble_fill: scatter).
bool variant_compatible(ChartType type, MaskVariant variant);

/// Default variant used by the generation flows for each chart type.
MaskVariant default_variant(ChartType type);

struct MaskOptions {
    /// Full width of the stroke_band variant in pixels.
    double band_width = 24.0;
};

/// Binary raster of chart marks; the condition carried into generation.
struct ChartMask {
    BinaryMask pixels;
    MaskVariant variant = MaskVariant::solid_marks;
    ChartGeometry source_geometry;

    Size size() const { return pixels.size(); }
};

/// Rasterizes the marks with pixel-centre sampling: a pixel is set when its
/// centre lies inside the mark region. render_plain uses the same sampling, so
/// the solid_marks mask equals the rendered mark pixels exactly.
ChartMask synthesize_mask(const ChartGeometry& geometry, MaskVariant variant, const MaskOptions& options = {});

/// Sets the pixels of one mark in `out` (which must match the canvas size).
void rasterize_mark(BinaryMask& out, const ChartGeometry& geometry, std::size_t mark, MaskVariant variant,
                    const MaskOptions& options = {});

/// Half-width of the background-coloured gap drawn between adjacent pie sectors.
inline constexpr double kPieSeparatorHalfWidth = 1.0;

} // namespace chartforge::chart
