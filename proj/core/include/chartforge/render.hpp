#pragma once

#include "chartforge/geometry.hpp"
#include "chartforge/raster.hpp"

namespace chartforge::chart {

struct RenderStyle {
    Rgba background{255, 255, 255, 255};
    Rgba mark{76, 114, 176, 255};
};

/// Plain chart preview: marks in one flat colour on a flat background, no
/// antialiasing. Deterministic.
RasterImage render_plain(const ChartGeometry& geometry, const RenderStyle& style = {});

/// Paints `on` where the mask is set and `off` elsewhere.
RasterImage render_mask(const BinaryMask& mask, Rgba on, Rgba off);

} // namespace chartforge::chart
