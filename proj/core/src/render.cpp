#include "chartforge/render.hpp"

#include "chartforge/mask.hpp"

namespace chartforge::chart {

RasterImage render_plain(const ChartGeometry& geometry, const RenderStyle& style) {
    const ChartMask marks = synthesize_mask(geometry, MaskVariant::solid_marks);
    return render_mask(marks.pixels, style.mark, style.background);
}

RasterImage render_mask(const BinaryMask& mask, Rgba on, Rgba off) {
    RasterImage out(mask.width(), mask.height(), off);
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y)) out.set(x, y, on);
    return out;
}

} // namespace chartforge::chart
