#include "chartforge/attention.hpp"

#include "chartforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace chartforge::attention {

AttentionResult cross_attention(const AttentionInputs& in) {
    const auto& q = in.queries;
    const auto& k = in.keys;
    const auto& v = in.values;
    if (q.rows() == 0 || k.rows() == 0)
        throw Error(ErrorCode::DimensionMismatch, "queries and keys must be non-empty");
    if (q.cols() != k.cols())
        throw Error(ErrorCode::DimensionMismatch, "query width " + std::to_string(q.cols()) + " != key width " +
                                                      std::to_string(k.cols()));
    if (in.dim != q.cols())
        throw Error(ErrorCode::DimensionMismatch, "dim " + std::to_string(in.dim) + " != projection width " +
                                                      std::to_string(q.cols()));
    if (v.rows() != k.rows())
        throw Error(ErrorCode::DimensionMismatch, "values must have one row per key");

    AttentionResult out;
    out.scores = (q * k.transpose()) / std::sqrt(static_cast<double>(in.dim));
    for (Eigen::Index r = 0; r < out.scores.rows(); ++r) {
        auto row = out.scores.row(r);
        row.array() = (row.array() - row.maxCoeff()).exp();
        row /= row.sum();
    }
    out.output = out.scores * v;
    return out;
}

AttentionGrid::AttentionGrid(int n, std::vector<double> v, std::string t)
    : side(n), values(std::move(v)), token(std::move(t)) {
    validate();
}

double AttentionGrid::mean() const {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

void AttentionGrid::validate() const {
    if (side <= 0 || values.size() != static_cast<std::size_t>(side) * side)
        throw Error(ErrorCode::InvalidArgument, "attention grid must hold side*side values");
    for (double x : values)
        if (!std::isfinite(x) || x < 0.0) throw Error(ErrorCode::InvalidArgument, "attention values must be finite and >= 0");
}

std::size_t ObjectMask::count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

ObjectMask threshold_mask(const AttentionGrid& grid) {
    grid.validate();
    const double m = grid.mean();
    ObjectMask out;
    out.side = grid.side;
    out.bits.resize(grid.values.size());
    for (std::size_t i = 0; i < grid.values.size(); ++i) out.bits[i] = grid.values[i] > m ? 1 : 0;
    return out;
}

namespace {

// Bilinear lookup in an n x n row-major lattice at lattice coordinates (u, v),
// clamped to the lattice.
template <typename Get>
double lattice_bilinear(int n, double u, double v, Get get) {
    if (n == 1) return get(0, 0);
    u = std::clamp(u, 0.0, static_cast<double>(n - 1));
    v = std::clamp(v, 0.0, static_cast<double>(n - 1));
    const int i0 = std::min(static_cast<int>(std::floor(u)), n - 2);
    const int j0 = std::min(static_cast<int>(std::floor(v)), n - 2);
    const double tu = u - i0;
    const double tv = v - j0;
    const double top = get(j0, i0) * (1.0 - tu) + get(j0, i0 + 1) * tu;
    const double bottom = get(j0 + 1, i0) * (1.0 - tu) + get(j0 + 1, i0 + 1) * tu;
    return top * (1.0 - tv) + bottom * tv;
}

} // namespace

double grid_value_at(const AttentionGrid& grid, Size target, double x, double y) {
    const int n = grid.side;
    const double u = (x + 0.5) * n / target.width - 0.5;
    const double v = (y + 0.5) * n / target.height - 0.5;
    return lattice_bilinear(n, u, v, [&](int r, int c) { return grid.at(r, c); });
}

FloatImage upsample(const AttentionGrid& grid, Size target) {
    grid.validate();
    FloatImage out(target.width, target.height);
    for (int y = 0; y < target.height; ++y)
        for (int x = 0; x < target.width; ++x) out.at(x, y) = grid_value_at(grid, target, x, y);
    return out;
}

double mask_value_at(const ObjectMask& mask, Size target, double x, double y) {
    const int n = mask.side;
    const double u = (x + 0.5) * n / target.width - 0.5;
    const double v = (y + 0.5) * n / target.height - 0.5;
    return lattice_bilinear(n, u, v, [&](int r, int c) { return mask.at(r, c) ? 1.0 : 0.0; });
}

BinaryMask upsample_mask(const ObjectMask& mask, Size target) {
    BinaryMask out(target.width, target.height);
    for (int y = 0; y < target.height; ++y)
        for (int x = 0; x < target.width; ++x) out.set(x, y, mask_value_at(mask, target, x, y) >= 0.5);
    return out;
}

ExtractedObject apply_mask(const ObjectMask& mask, const RasterImage& image) {
    if (image.width() != image.height())
        throw Error(ErrorCode::NonSquareImage,
                    std::to_string(image.width()) + "x" + std::to_string(image.height()));
    const BinaryMask up = upsample_mask(mask, image.size());
    ExtractedObject out{RasterImage(image.width(), image.height()), true};
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x) {
            Rgba c = image.at(x, y);
            c.a = up.at(x, y) ? 255 : 0;
            out.image.set(x, y, c);
        }
    return out;
}

namespace {

constexpr std::uint8_t kFeatherAlpha = 128;

ExtractedObject largest_component(const ExtractedObject& object) {
    const RasterImage& img = object.image;
    const int w = img.width(), h = img.height();
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    int best = -1;
    std::size_t best_size = 0;
    int next = 0;
    std::deque<std::pair<int, int>> queue;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (img.alpha(x, y) == 0 || label[y * w + x] >= 0) continue;
            std::size_t size = 0;
            label[y * w + x] = next;
            queue.emplace_back(x, y);
            while (!queue.empty()) {
                auto [cx, cy] = queue.front();
                queue.pop_front();
                ++size;
                const int nx[4] = {cx - 1, cx + 1, cx, cx};
                const int ny[4] = {cy, cy, cy - 1, cy + 1};
                for (int k = 0; k < 4; ++k) {
                    if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
                    int& l = label[ny[k] * w + nx[k]];
                    if (l >= 0 || img.alpha(nx[k], ny[k]) == 0) continue;
                    l = next;
                    queue.emplace_back(nx[k], ny[k]);
                }
            }
            if (size > best_size) {
                best_size = size;
                best = next;
            }
            ++next;
        }

    ExtractedObject out{img, false};
    auto inside = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h && label[y * w + x] == best; };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!inside(x, y)) {
                out.image.set_alpha(x, y, 0);
                continue;
            }
            const bool rim = !inside(x - 1, y) || !inside(x + 1, y) || !inside(x, y - 1) || !inside(x, y + 1);
            if (rim) out.image.set_alpha(x, y, std::min(img.alpha(x, y), kFeatherAlpha));
        }
    return out;
}

} // namespace

ExtractedObject refine_object(const ExtractedObject& object, const SegmentationProvider* provider) {
    if (!object.coarse) throw Error(ErrorCode::InvalidArgument, "object is already refined");
    if (!provider) return largest_component(object);

    const auto matte = provider->alpha_matte(object.image);
    const std::size_t n = static_cast<std::size_t>(object.image.width()) * object.image.height();
    if (matte.size() != n) throw Error(ErrorCode::ProviderUnavailable, "segmentation matte has wrong size");
    ExtractedObject out{object.image, false};
    for (int y = 0; y < object.image.height(); ++y)
        for (int x = 0; x < object.image.width(); ++x) {
            const auto m = matte[static_cast<std::size_t>(y) * object.image.width() + x];
            out.image.set_alpha(x, y, std::min(object.image.alpha(x, y), m));
        }
    return out;
}

Rgb dominant_color(const AttentionGrid& grid, const RasterImage& image) {
    if (image.empty()) throw Error(ErrorCode::InvalidArgument, "empty image");
    const FloatImage up = upsample(grid, image.size());
    const double m = grid.mean();
    double wsum = 0.0, r = 0.0, g = 0.0, b = 0.0;
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x) {
            const double wgt = up.at(x, y);
            if (!(wgt > m)) continue;
            const Rgba c = image.at(x, y);
            wsum += wgt;
            r += wgt * c.r;
            g += wgt * c.g;
            b += wgt * c.b;
        }
    if (wsum <= 0.0) {
        for (int y = 0; y < image.height(); ++y)
            for (int x = 0; x < image.width(); ++x) {
                const Rgba c = image.at(x, y);
                r += c.r;
                g += c.g;
                b += c.b;
            }
        wsum = static_cast<double>(image.width()) * image.height();
    }
    return {clamp_to_byte(r / wsum), clamp_to_byte(g / wsum), clamp_to_byte(b / wsum)};
}

} // namespace chartforge::attention
