#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace chartforge {

struct Size {
    int width = 0;
    int height = 0;
    friend bool operator==(const Size&, const Size&) = default;
};

/// Integer pixel rectangle, half-open: [x, x + w) x [y, y + h).
struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    int right() const { return x + w; }
    int bottom() const { return y + h; }
    bool empty() const { return w <= 0 || h <= 0; }
    bool contains(int px, int py) const { return px >= x && px < x + w && py >= y && py < y + h; }
    Rect intersect(const Rect& o) const;
    Rect inflate(int by) const { return {x - by, y - by, w + 2 * by, h + 2 * by}; }
    friend bool operator==(const Rect&, const Rect&) = default;
};

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Rgba {
    std::uint8_t r = 0, g = 0, b = 0, a = 0;
    Rgb rgb() const { return {r, g, b}; }
    friend bool operator==(const Rgba&, const Rgba&) = default;
};

/// 8-bit RGBA raster, row-major, tightly packed.
class RasterImage {
  public:
    RasterImage() = default;
    RasterImage(int width, int height, Rgba fill = {0, 0, 0, 0});

    int width() const { return width_; }
    int height() const { return height_; }
    Size size() const { return {width_, height_}; }
    bool empty() const { return width_ == 0 || height_ == 0; }

    Rgba at(int x, int y) const {
        const std::uint8_t* p = &pixels_[index(x, y)];
        return {p[0], p[1], p[2], p[3]};
    }
    void set(int x, int y, Rgba c) {
        std::uint8_t* p = &pixels_[index(x, y)];
        p[0] = c.r;
        p[1] = c.g;
        p[2] = c.b;
        p[3] = c.a;
    }
    std::uint8_t alpha(int x, int y) const { return pixels_[index(x, y) + 3]; }
    void set_alpha(int x, int y, std::uint8_t a) { pixels_[index(x, y) + 3] = a; }

    std::span<const std::uint8_t> bytes() const { return pixels_; }
    std::span<std::uint8_t> bytes() { return pixels_; }

    /// True when at least one pixel is not fully opaque.
    bool has_transparency() const;

    RasterImage crop(const Rect& r) const;
    /// Copies `src` onto this image at (x, y), clipped; no blending.
    void paste(const RasterImage& src, int x, int y);

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

  private:
    std::size_t index(int x, int y) const {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 4;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// Binary raster; every cell is 0 or 1.
class BinaryMask {
  public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false)
        : width_(width), height_(height),
          bits_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0) {}

    int width() const { return width_; }
    int height() const { return height_; }
    Size size() const { return {width_, height_}; }

    bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool v) { bits_[index(x, y)] = v ? 1 : 0; }
    /// Out-of-bounds reads are 0.
    bool get_or_zero(int x, int y) const {
        return x >= 0 && y >= 0 && x < width_ && y < height_ && at(x, y);
    }

    std::size_t count() const;
    bool any() const { return count() > 0; }
    Rect bounding_box() const;
    BinaryMask crop(const Rect& r) const;
    /// Disc dilation with the given pixel radius.
    BinaryMask dilate(int radius) const;
    std::span<const std::uint8_t> bits() const { return bits_; }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

  private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Real-valued raster with 1..4 interleaved channels.
class FloatImage {
  public:
    FloatImage() = default;
    FloatImage(int width, int height, int channels = 1, double fill = 0.0)
        : width_(width), height_(height), channels_(channels),
          values_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * static_cast<std::size_t>(channels), fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }

    double at(int x, int y, int c = 0) const { return values_[index(x, y, c)]; }
    double& at(int x, int y, int c = 0) { return values_[index(x, y, c)]; }
    std::span<const double> values() const { return values_; }

    friend bool operator==(const FloatImage&, const FloatImage&) = default;

  private:
    std::size_t index(int x, int y, int c) const {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) *
                   static_cast<std::size_t>(channels_) +
               static_cast<std::size_t>(c);
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 1;
    std::vector<double> values_;
};

/// Rec. 601 luma in [0, 255].
inline double luminance(Rgba c) { return 0.299 * c.r + 0.587 * c.g + 0.114 * c.b; }

inline std::uint8_t clamp_to_byte(double v) {
    return static_cast<std::uint8_t>(std::clamp(v + 0.5, 0.0, 255.0));
}

/// Source-over blend of one pixel.
Rgba blend_over(Rgba dst, Rgba src);

/// Source-over composite of `src` onto `dst` at integer offset.
void alpha_over(RasterImage& dst, const RasterImage& src, int x, int y);

} // namespace chartforge
