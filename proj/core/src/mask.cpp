#include "chartforge/mask.hpp"

#include "chartforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace chartforge::chart {
namespace {

double segment_distance(PointF p, PointF a, PointF b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double cx = a.x + t * dx - p.x, cy = a.y + t * dy - p.y;
    return std::sqrt(cx * cx + cy * cy);
}

void rasterize_band(BinaryMask& out, const LinePolyline& line, double half_width) {
    const auto& pts = line.points;
    auto stamp = [&](PointF a, PointF b) {
        const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - half_width - 1)));
        const int x1 = std::min(out.width() - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + half_width + 1)));
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - half_width - 1)));
        const int y1 = std::min(out.height() - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + half_width + 1)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
                if (segment_distance({x + 0.5, y + 0.5}, a, b) <= half_width) out.set(x, y, true);
    };
    if (pts.size() == 1) stamp(pts[0], pts[0]);
    for (std::size_t i = 1; i < pts.size(); ++i) stamp(pts[i - 1], pts[i]);
}

void rasterize_under_curve(BinaryMask& out, const LinePolyline& line, int baseline) {
    const auto& pts = line.points;
    if (pts.size() < 2) return;
    for (int x = 0; x < out.width(); ++x) {
        const double cx = x + 0.5;
        if (cx < pts.front().x || cx > pts.back().x) continue;
        auto it = std::upper_bound(pts.begin(), pts.end(), cx, [](double v, const PointF& p) { return v < p.x; });
        const std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - pts.begin()), pts.size() - 1);
        const std::size_t lo = hi == 0 ? 0 : hi - 1;
        const double span = pts[hi].x - pts[lo].x;
        const double t = span > 0 ? (cx - pts[lo].x) / span : 0.0;
        const double curve = pts[lo].y + t * (pts[hi].y - pts[lo].y);
        for (int y = 0; y < std::min(baseline, out.height()); ++y)
            if (y + 0.5 >= curve) out.set(x, y, true);
    }
}

double ray_distance(double dx, double dy, double angle) {
    const double ux = std::cos(angle), uy = std::sin(angle);
    const double along = dx * ux + dy * uy;
    if (along < 0) return std::sqrt(dx * dx + dy * dy);
    return std::abs(dx * uy - dy * ux);
}

void rasterize_sector(BinaryMask& out, const PieSector& s, bool separated) {
    if (s.sweep() <= 0) return;
    const int x0 = std::max(0, static_cast<int>(std::floor(s.center.x - s.radius)));
    const int x1 = std::min(out.width() - 1, static_cast<int>(std::ceil(s.center.x + s.radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(s.center.y - s.radius)));
    const int y1 = std::min(out.height() - 1, static_cast<int>(std::ceil(s.center.y + s.radius)));
    const double two_pi = 2.0 * std::numbers::pi;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            const double dx = x + 0.5 - s.center.x, dy = y + 0.5 - s.center.y;
            if (dx * dx + dy * dy > s.radius * s.radius) continue;
            double rel = std::fmod(std::atan2(dy, dx) - s.start_angle, two_pi);
            if (rel < 0) rel += two_pi;
            if (rel >= s.sweep()) continue;
            if (separated && (ray_distance(dx, dy, s.start_angle) < kPieSeparatorHalfWidth ||
                              ray_distance(dx, dy, s.end_angle) < kPieSeparatorHalfWidth))
                continue;
            out.set(x, y, true);
        }
}

void rasterize_disc(BinaryMask& out, const ScatterBubble& b) {
    const int x0 = std::max(0, static_cast<int>(std::floor(b.center.x - b.radius)));
    const int x1 = std::min(out.width() - 1, static_cast<int>(std::ceil(b.center.x + b.radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(b.center.y - b.radius)));
    const int y1 = std::min(out.height() - 1, static_cast<int>(std::ceil(b.center.y + b.radius)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            const double dx = x + 0.5 - b.center.x, dy = y + 0.5 - b.center.y;
            if (dx * dx + dy * dy <= b.radius * b.radius) out.set(x, y, true);
        }
}

bool pie_is_separated(const ChartGeometry& g) {
    int nonzero = 0;
    for (const auto& m : g.marks)
        if (const auto* s = std::get_if<PieSector>(&m.shape); s && s->sweep() > 0) ++nonzero;
    return nonzero > 1;
}

} // namespace

std::string_view to_string(MaskVariant v) {
    switch (v) {
    case MaskVariant::solid_marks: return "solid_marks";
    case MaskVariant::filled_under_curve: return "filled_under_curve";
    case MaskVariant::stroke_band: return "stroke_band";
    case MaskVariant::sector_fill: return "sector_fill";
    case MaskVariant::bubble_fill: return "bubble_fill";
    }
    return "solid_marks";
}

MaskVariant mask_variant_from_string(std::string_view name) {
    for (auto v : {MaskVariant::solid_marks, MaskVariant::filled_under_curve, MaskVariant::stroke_band,
                   MaskVariant::sector_fill, MaskVariant::bubble_fill})
        if (to_string(v) == name) return v;
    throw Error(ErrorCode::InvalidArgument, "unknown mask variant \"" + std::string(name) + "\"");
}

bool variant_compatible(ChartType type, MaskVariant variant) {
    switch (variant) {
    case MaskVariant::solid_marks: return true;
    case MaskVariant::filled_under_curve:
    case MaskVariant::stroke_band: return type == ChartType::line;
    case MaskVariant::sector_fill: return type == ChartType::pie;
    case MaskVariant::bubble_fill: return type == ChartType::scatter;
    }
    return false;
}

MaskVariant default_variant(ChartType type) {
    return type == ChartType::line ? MaskVariant::stroke_band : MaskVariant::solid_marks;
}

void rasterize_mark(BinaryMask& out, const ChartGeometry& g, std::size_t mark, MaskVariant variant,
                    const MaskOptions& options) {
    if (!variant_compatible(g.type, variant))
        throw Error(ErrorCode::IncompatibleVariant,
                    std::string(to_string(variant)) + " does not apply to " + std::string(to_string(g.type)) + " charts");
    const Mark& m = g.marks.at(mark);
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, BarRect>) {
                const Rect r = s.rect.intersect({0, 0, out.width(), out.height()});
                for (int y = r.y; y < r.bottom(); ++y)
                    for (int x = r.x; x < r.right(); ++x) out.set(x, y, true);
            } else if constexpr (std::is_same_v<T, LinePolyline>) {
                if (variant == MaskVariant::filled_under_curve)
                    rasterize_under_curve(out, s, g.plot_area.bottom());
                else if (variant == MaskVariant::stroke_band)
                    rasterize_band(out, s, options.band_width / 2.0);
                else
                    rasterize_band(out, s, g.line_width / 2.0);
            } else if constexpr (std::is_same_v<T, PieSector>) {
                rasterize_sector(out, s, pie_is_separated(g));
            } else {
                rasterize_disc(out, s);
            }
        },
        m.shape);
}

ChartMask synthesize_mask(const ChartGeometry& geometry, MaskVariant variant, const MaskOptions& options) {
    if (!variant_compatible(geometry.type, variant))
        throw Error(ErrorCode::IncompatibleVariant, std::string(to_string(variant)) + " does not apply to " +
                                                        std::string(to_string(geometry.type)) + " charts");
    ChartMask mask{BinaryMask(geometry.canvas.width, geometry.canvas.height), variant, geometry};
    for (std::size_t i = 0; i < geometry.marks.size(); ++i) rasterize_mark(mask.pixels, geometry, i, variant, options);
    return mask;
}

} // namespace chartforge::chart
