#include "chartforge/fusion.hpp"

#include "chartforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace chartforge::attention {

double search_theta(int i) { return (i - 9) * std::numbers::pi / 36.0; }
double search_scale(int j) { return (10 + j) / 20.0; }

namespace {

struct Trig {
    double cos_t, sin_t, scale;
};

Trig trig(const AffineParams& p) { return {std::cos(p.theta), std::sin(p.theta), p.scale}; }

bool source(Size target, const Trig& t, int x, int y, double& qx, double& qy) {
    const double cx = (target.width - 1) / 2.0;
    const double cy = (target.height - 1) / 2.0;
    const double dx = x - cx;
    const double dy = y - cy;
    qx = cx + (t.cos_t * dx + t.sin_t * dy) / t.scale;
    qy = cy + (-t.sin_t * dx + t.cos_t * dy) / t.scale;
    return !(qx < -0.5 || qy < -0.5 || qx >= target.width - 0.5 || qy >= target.height - 0.5);
}

double transformed(const AttentionGrid& grid, Size target, const Trig& t, int x, int y) {
    double qx, qy;
    return source(target, t, x, y, qx, qy) ? grid_value_at(grid, target, qx, qy) : 0.0;
}

double objective(const ObjectMask& footprint, const BinaryMask& mask, const Trig& t) {
    double qx, qy;
    double count = 0.0;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y) && source(mask.size(), t, x, y, qx, qy) &&
                mask_value_at(footprint, mask.size(), qx, qy) >= 0.5)
                count += 1.0;
    return count;
}

bool better_tie(const AffineParams& cand, const AffineParams& best) {
    const double ct = std::abs(cand.theta), bt = std::abs(best.theta);
    if (ct != bt) return ct < bt;
    return std::abs(cand.scale - 1.0) < std::abs(best.scale - 1.0);
}

} // namespace

bool source_position(Size target, const AffineParams& p, int x, int y, double& qx, double& qy) {
    return source(target, trig(p), x, y, qx, qy);
}

double transformed_value(const AttentionGrid& grid, Size target, const AffineParams& p, int x, int y) {
    return transformed(grid, target, trig(p), x, y);
}

bool transformed_footprint(const ObjectMask& footprint, Size target, const AffineParams& p, int x, int y) {
    double qx, qy;
    return source(target, trig(p), x, y, qx, qy) && mask_value_at(footprint, target, qx, qy) >= 0.5;
}

double fusion_objective(const ObjectMask& footprint, const BinaryMask& mask, const AffineParams& p) {
    return objective(footprint, mask, trig(p));
}

FusedConditionImage fuse_foreground(const BinaryMask& mask, const AttentionGrid& grid) {
    grid.validate();
    if (!mask.any()) throw Error(ErrorCode::EmptyMask, "chart mask has no set pixel");

    const ObjectMask footprint = threshold_mask(grid);
    AffineParams best;
    double best_value = -1.0;
    for (int i = 0; i < kThetaSteps; ++i)
        for (int j = 0; j < kScaleSteps; ++j) {
            const AffineParams cand{search_theta(i), search_scale(j)};
            const double v = objective(footprint, mask, trig(cand));
            if (v > best_value || (v == best_value && better_tie(cand, best))) {
                best_value = v;
                best = cand;
            }
        }

    FusedConditionImage out;
    out.params = best;
    out.objective = best_value;
    out.pixels = FloatImage(mask.width(), mask.height());
    const double peak = *std::max_element(grid.values.begin(), grid.values.end());
    if (peak > 0.0) {
        const Trig t = trig(best);
        for (int y = 0; y < mask.height(); ++y)
            for (int x = 0; x < mask.width(); ++x)
                if (mask.at(x, y)) out.pixels.at(x, y) = transformed(grid, mask.size(), t, x, y) / peak;
    }
    out.regions.push_back({Rect{0, 0, mask.width(), mask.height()}, best, best_value});
    return out;
}

FusedConditionImage fuse_foreground(const chart::ChartMask& mask, const AttentionGrid& grid) {
    return fuse_foreground(mask.pixels, grid);
}

FusedConditionImage fuse_foreground_marks(const chart::ChartMask& mask, const AttentionGrid& grid) {
    grid.validate();
    if (!mask.pixels.any()) throw Error(ErrorCode::EmptyMask, "chart mask has no set pixel");
    const auto& geo = mask.source_geometry;
    const Rect canvas{0, 0, mask.pixels.width(), mask.pixels.height()};

    FusedConditionImage out;
    out.pixels = FloatImage(canvas.w, canvas.h);
    // Pixels not claimed by any mark region still need a fallback pass.
    BinaryMask covered(canvas.w, canvas.h);
    for (std::size_t i = 0; i < geo.marks.size(); ++i) {
        BinaryMask footprint(canvas.w, canvas.h);
        chart::rasterize_mark(footprint, geo, i, mask.variant);
        if (!footprint.any()) continue;
        const Rect region = footprint.bounding_box().inflate(kMarkFusionMargin).intersect(canvas);
        const BinaryMask local = mask.pixels.crop(region);
        if (!local.any()) continue;
        const FusedConditionImage part = fuse_foreground(local, grid);
        for (int y = 0; y < region.h; ++y)
            for (int x = 0; x < region.w; ++x) {
                double& dst = out.pixels.at(region.x + x, region.y + y);
                dst = std::max(dst, part.pixels.at(x, y));
                covered.set(region.x + x, region.y + y, true);
            }
        out.regions.push_back({region, part.params, part.objective});
        out.objective += part.objective;
    }

    BinaryMask rest(canvas.w, canvas.h);
    for (int y = 0; y < canvas.h; ++y)
        for (int x = 0; x < canvas.w; ++x) rest.set(x, y, mask.pixels.at(x, y) && !covered.at(x, y));
    if (out.regions.empty() || rest.any()) {
        const FusedConditionImage whole = fuse_foreground(mask.pixels, grid);
        for (int y = 0; y < canvas.h; ++y)
            for (int x = 0; x < canvas.w; ++x)
                if (rest.at(x, y) || out.regions.empty()) out.pixels.at(x, y) = whole.pixels.at(x, y);
        if (out.regions.empty()) {
            out.regions = whole.regions;
            out.objective = whole.objective;
        }
    }
    out.params = out.regions.front().params;
    return out;
}

FusedConditionImage fuse_background(const BinaryMask& mask, Rgb color) {
    if (!mask.any()) throw Error(ErrorCode::EmptyMask, "chart mask has no set pixel");
    FusedConditionImage out;
    out.pixels = FloatImage(mask.width(), mask.height(), 3);
    const double rgb[3] = {color.r / 255.0, color.g / 255.0, color.b / 255.0};
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y))
                for (int c = 0; c < 3; ++c) out.pixels.at(x, y, c) = rgb[c];
    out.regions.push_back({Rect{0, 0, mask.width(), mask.height()}, {}, 0.0});
    return out;
}

RasterImage to_raster(const FusedConditionImage& image) {
    const FloatImage& f = image.pixels;
    RasterImage out(f.width(), f.height());
    for (int y = 0; y < f.height(); ++y)
        for (int x = 0; x < f.width(); ++x) {
            Rgba c{0, 0, 0, 255};
            if (f.channels() >= 3) {
                c.r = clamp_to_byte(f.at(x, y, 0) * 255.0);
                c.g = clamp_to_byte(f.at(x, y, 1) * 255.0);
                c.b = clamp_to_byte(f.at(x, y, 2) * 255.0);
            } else {
                c.r = c.g = c.b = clamp_to_byte(f.at(x, y, 0) * 255.0);
            }
            out.set(x, y, c);
        }
    return out;
}

} // namespace chartforge::attention
