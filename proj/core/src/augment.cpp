#include "chartforge/augment.hpp"

#include "chartforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

namespace chartforge::chart {
namespace {

using Field = std::vector<double>;

Field to_field(const BinaryMask& m) {
    Field f(static_cast<std::size_t>(m.width()) * static_cast<std::size_t>(m.height()));
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) f[static_cast<std::size_t>(y) * m.width() + x] = m.at(x, y) ? 1.0 : 0.0;
    return f;
}

BinaryMask binarize(const Field& f, int w, int h) {
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.set(x, y, f[static_cast<std::size_t>(y) * w + x] >= 0.5);
    return out;
}

// Zero outside the raster.
double sample(const Field& f, int w, int h, double x, double y) {
    const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
    const double tx = x - x0, ty = y - y0;
    auto at = [&](int xi, int yi) {
        return xi < 0 || yi < 0 || xi >= w || yi >= h ? 0.0 : f[static_cast<std::size_t>(yi) * w + xi];
    };
    const double top = at(x0, y0) * (1 - tx) + at(x0 + 1, y0) * tx;
    const double bot = at(x0, y0 + 1) * (1 - tx) + at(x0 + 1, y0 + 1) * tx;
    return top * (1 - ty) + bot * ty;
}

BinaryMask gaussian_blur(const BinaryMask& m, double sigma) {
    if (sigma <= 0) return m;
    const int w = m.width(), h = m.height();
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0;
    for (int i = -radius; i <= radius; ++i) sum += k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    for (auto& v : k) v /= sum;

    const Field src = to_field(m);
    Field tmp(src.size(), 0.0), dst(src.size(), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            for (int i = -radius; i <= radius; ++i) {
                const int xs = x + i;
                if (xs >= 0 && xs < w) acc += k[i + radius] * src[static_cast<std::size_t>(y) * w + xs];
            }
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            for (int i = -radius; i <= radius; ++i) {
                const int ys = y + i;
                if (ys >= 0 && ys < h) acc += k[i + radius] * tmp[static_cast<std::size_t>(ys) * w + x];
            }
            dst[static_cast<std::size_t>(y) * w + x] = acc;
        }
    return binarize(dst, w, h);
}

BinaryMask motion_blur(const BinaryMask& m, double length, double angle) {
    const int taps = static_cast<int>(std::lround(length));
    if (taps <= 1) return m;
    const int w = m.width(), h = m.height();
    const double ux = std::cos(angle), uy = std::sin(angle);
    const Field src = to_field(m);
    Field dst(src.size(), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            for (int i = 0; i < taps; ++i) {
                const double t = i - (taps - 1) / 2.0;
                acc += sample(src, w, h, x + t * ux, y + t * uy);
            }
            dst[static_cast<std::size_t>(y) * w + x] = acc / taps;
        }
    return binarize(dst, w, h);
}

BinaryMask warp(const BinaryMask& m, double amplitude, double wavelength, std::uint64_t seed) {
    if (amplitude == 0) return m;
    const int w = m.width(), h = m.height();
    std::mt19937_64 rng(seed);
    const double phase = 2.0 * std::numbers::pi * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    const Field src = to_field(m);
    Field dst(src.size(), 0.0);
    for (int x = 0; x < w; ++x) {
        const double dy = amplitude / 2.0 * std::sin(2.0 * std::numbers::pi * x / wavelength + phase);
        for (int y = 0; y < h; ++y) dst[static_cast<std::size_t>(y) * w + x] = sample(src, w, h, x, y - dy);
    }
    return binarize(dst, w, h);
}

// Row of the bar's data edge in the given column, or -1.
int edge_row(const BinaryMask& m, int x, const BarRect& bar, int baseline) {
    if (bar.value >= 0) {
        for (int y = 0; y < std::min(baseline, m.height()); ++y)
            if (m.at(x, y)) return y;
    } else {
        for (int y = m.height() - 1; y >= std::max(baseline, 0); --y)
            if (m.at(x, y)) return y;
    }
    return -1;
}

std::optional<double> median_edge(const BinaryMask& m, const BarRect& bar, int baseline) {
    const int x0 = bar.rect.x + bar.rect.w / 4;
    const int x1 = std::max(x0 + 1, bar.rect.x + (3 * bar.rect.w) / 4);
    std::vector<int> rows;
    for (int x = std::max(0, x0); x < std::min(x1, m.width()); ++x)
        if (int r = edge_row(m, x, bar, baseline); r >= 0) rows.push_back(r);
    if (rows.empty()) return std::nullopt;
    std::sort(rows.begin(), rows.end());
    const std::size_t n = rows.size();
    return n % 2 ? rows[n / 2] : 0.5 * (rows[n / 2 - 1] + rows[n / 2]);
}

std::optional<double> column_centroid(const BinaryMask& m, int x) {
    double sum = 0;
    int count = 0;
    for (int y = 0; y < m.height(); ++y)
        if (m.at(x, y)) {
            sum += y;
            ++count;
        }
    if (count == 0) return std::nullopt;
    return sum / count;
}

} // namespace

std::string_view to_string(AugmentOp op) {
    switch (op) {
    case AugmentOp::gaussian_blur: return "gaussian_blur";
    case AugmentOp::motion_blur: return "motion_blur";
    case AugmentOp::warp: return "warp";
    }
    return "gaussian_blur";
}

AugmentOp augment_op_from_string(std::string_view name) {
    for (auto op : {AugmentOp::gaussian_blur, AugmentOp::motion_blur, AugmentOp::warp})
        if (to_string(op) == name) return op;
    throw Error(ErrorCode::InvalidArgument, "unknown augmentation \"" + std::string(name) + "\"");
}

BinaryMask apply_augmentation(const BinaryMask& mask, AugmentOp op, const AugmentParams& p, std::uint64_t seed) {
    switch (op) {
    case AugmentOp::gaussian_blur:
        if (p.sigma < 0 || !std::isfinite(p.sigma)) throw Error(ErrorCode::InvalidArgument, "sigma must be >= 0");
        return gaussian_blur(mask, p.sigma);
    case AugmentOp::motion_blur:
        if (p.length < 0 || !std::isfinite(p.length) || !std::isfinite(p.angle))
            throw Error(ErrorCode::InvalidArgument, "motion blur length must be >= 0");
        return motion_blur(mask, p.length, p.angle);
    case AugmentOp::warp:
        if (p.amplitude < 0 || !(p.wavelength > 0) || !std::isfinite(p.amplitude))
            throw Error(ErrorCode::InvalidArgument, "warp needs amplitude >= 0 and wavelength > 0");
        return warp(mask, p.amplitude, p.wavelength, seed);
    }
    return mask;
}

double integrity_shift(const ChartMask& before, const BinaryMask& after) {
    constexpr double lost = std::numeric_limits<double>::infinity();
    const ChartGeometry& g = before.source_geometry;
    double worst = 0.0;
    if (g.type == ChartType::bar) {
        for (const auto& m : g.marks) {
            const auto& bar = std::get<BarRect>(m.shape);
            if (bar.rect.empty()) continue;
            const auto b = median_edge(before.pixels, bar, g.baseline_y);
            if (!b) continue;
            const auto a = median_edge(after, bar, g.baseline_y);
            if (!a) return lost;
            worst = std::max(worst, std::abs(*a - *b));
        }
    } else if (g.type == ChartType::line) {
        int defined = 0, kept = 0;
        for (int x = 0; x < before.pixels.width(); ++x) {
            const auto b = column_centroid(before.pixels, x);
            if (!b) continue;
            ++defined;
            const auto a = column_centroid(after, x);
            if (!a) continue;
            ++kept;
            worst = std::max(worst, std::abs(*a - *b));
        }
        // Blurs may trim the rounded line caps; losing more than a tenth of
        // the trace counts as destroying it.
        if (defined > 0 && kept < 0.9 * defined) return lost;
    }
    return worst;
}

ChartMask augment(const ChartMask& mask, AugmentOp op, const AugmentParams& params, std::uint64_t seed) {
    ChartMask out{apply_augmentation(mask.pixels, op, params, seed), mask.variant, mask.source_geometry};
    const double shift = integrity_shift(mask, out.pixels);
    if (shift > kIntegrityTolerancePx) {
        std::ostringstream os;
        os << to_string(op) << " moved data edges by " << shift << " px (limit " << kIntegrityTolerancePx << ")";
        throw Error(ErrorCode::IntegrityViolated, os.str());
    }
    return out;
}

AugmentParams random_params(AugmentOp op, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ull);
    auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    AugmentParams p;
    switch (op) {
    case AugmentOp::gaussian_blur: p.sigma = kMaxSigma * unit(); break;
    case AugmentOp::motion_blur:
        p.length = kMaxMotionLength * unit();
        p.angle = std::numbers::pi * unit();
        break;
    case AugmentOp::warp:
        p.amplitude = kMaxWarpAmplitude * unit();
        p.wavelength = kMinWarpWavelength * (1.0 + 3.0 * unit());
        break;
    }
    return p;
}

} // namespace chartforge::chart
