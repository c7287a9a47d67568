#include "chartforge/raster.hpp"

#include <cmath>

namespace chartforge {

Rect Rect::intersect(const Rect& o) const {
    const int x0 = std::max(x, o.x);
    const int y0 = std::max(y, o.y);
    const int x1 = std::min(right(), o.right());
    const int y1 = std::min(bottom(), o.bottom());
    if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
    return {x0, y0, x1 - x0, y1 - y0};
}

RasterImage::RasterImage(int width, int height, Rgba fill)
    : width_(width), height_(height),
      pixels_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 4) {
    for (std::size_t i = 0; i < pixels_.size(); i += 4) {
        pixels_[i] = fill.r;
        pixels_[i + 1] = fill.g;
        pixels_[i + 2] = fill.b;
        pixels_[i + 3] = fill.a;
    }
}

bool RasterImage::has_transparency() const {
    for (std::size_t i = 3; i < pixels_.size(); i += 4)
        if (pixels_[i] != 255) return true;
    return false;
}

RasterImage RasterImage::crop(const Rect& r) const {
    const Rect c = r.intersect({0, 0, width_, height_});
    RasterImage out(std::max(c.w, 0), std::max(c.h, 0));
    for (int y = 0; y < c.h; ++y)
        for (int x = 0; x < c.w; ++x) out.set(x, y, at(c.x + x, c.y + y));
    return out;
}

void RasterImage::paste(const RasterImage& src, int x, int y) {
    for (int sy = 0; sy < src.height(); ++sy) {
        const int dy = y + sy;
        if (dy < 0 || dy >= height_) continue;
        for (int sx = 0; sx < src.width(); ++sx) {
            const int dx = x + sx;
            if (dx < 0 || dx >= width_) continue;
            set(dx, dy, src.at(sx, sy));
        }
    }
}

std::size_t BinaryMask::count() const {
    std::size_t n = 0;
    for (auto b : bits_) n += b;
    return n;
}

Rect BinaryMask::bounding_box() const {
    int x0 = width_, y0 = height_, x1 = -1, y1 = -1;
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            if (at(x, y)) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
    if (x1 < 0) return {};
    return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

BinaryMask BinaryMask::crop(const Rect& r) const {
    BinaryMask out(std::max(r.w, 0), std::max(r.h, 0));
    for (int y = 0; y < r.h; ++y)
        for (int x = 0; x < r.w; ++x) out.set(x, y, get_or_zero(r.x + x, r.y + y));
    return out;
}

BinaryMask BinaryMask::dilate(int radius) const {
    if (radius <= 0) return *this;
    std::vector<std::pair<int, int>> offsets;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) offsets.emplace_back(dx, dy);
    BinaryMask out(width_, height_);
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x) {
            if (!at(x, y)) continue;
            for (auto [dx, dy] : offsets) {
                const int nx = x + dx, ny = y + dy;
                if (nx >= 0 && ny >= 0 && nx < width_ && ny < height_) out.set(nx, ny, true);
            }
        }
    return out;
}

Rgba blend_over(Rgba d, Rgba s) {
    if (s.a == 0) return d;
    if (s.a == 255) return s;
    const double sa = s.a / 255.0;
    const double da = d.a / 255.0;
    const double oa = sa + da * (1.0 - sa);
    auto mix = [&](std::uint8_t sc, std::uint8_t dc) { return clamp_to_byte((sc * sa + dc * da * (1.0 - sa)) / oa); };
    return {mix(s.r, d.r), mix(s.g, d.g), mix(s.b, d.b), clamp_to_byte(oa * 255.0)};
}

void alpha_over(RasterImage& dst, const RasterImage& src, int x, int y) {
    for (int sy = 0; sy < src.height(); ++sy) {
        const int dy = y + sy;
        if (dy < 0 || dy >= dst.height()) continue;
        for (int sx = 0; sx < src.width(); ++sx) {
            const int dx = x + sx;
            if (dx < 0 || dx >= dst.width()) continue;
            dst.set(dx, dy, blend_over(dst.at(dx, dy), src.at(sx, sy)));
        }
    }
}

} // namespace chartforge
