#include "chartforge/error.hpp"
#include "chartforge/modification.hpp"

#include <algorithm>
#include <vector>

namespace chartforge::modify {

namespace {

std::vector<double> luma_plane(const RasterImage& img, int rows) {
    std::vector<double> out(static_cast<std::size_t>(img.width()) * rows);
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < img.width(); ++x) out[static_cast<std::size_t>(y) * img.width() + x] = luminance(img.at(x, y));
    return out;
}

} // namespace

double ssim(const RasterImage& a, const RasterImage& b) {
    if (a.width() != b.width())
        throw Error(ErrorCode::SizeMismatch, "SSIM needs equal widths, got " + std::to_string(a.width()) + " and " +
                                                 std::to_string(b.width()));
    const int w = a.width();
    const int h = std::min(a.height(), b.height());
    if (w == 0 || h == 0) throw Error(ErrorCode::SizeMismatch, "SSIM of an empty image");
    const auto la = luma_plane(a, h);
    const auto lb = luma_plane(b, h);
    const int ww = std::min(kSsimWindow, w);
    const int wh = std::min(kSsimWindow, h);
    const double n = static_cast<double>(ww) * wh;
    const double c1 = (kSsimK1 * kSsimRange) * (kSsimK1 * kSsimRange);
    const double c2 = (kSsimK2 * kSsimRange) * (kSsimK2 * kSsimRange);

    double total = 0.0;
    long windows = 0;
    for (int y0 = 0; y0 + wh <= h; ++y0)
        for (int x0 = 0; x0 + ww <= w; ++x0) {
            double sa = 0.0, sb = 0.0;
            for (int y = y0; y < y0 + wh; ++y)
                for (int x = x0; x < x0 + ww; ++x) {
                    sa += la[static_cast<std::size_t>(y) * w + x];
                    sb += lb[static_cast<std::size_t>(y) * w + x];
                }
            const double ma = sa / n, mb = sb / n;
            double va = 0.0, vb = 0.0, cov = 0.0;
            for (int y = y0; y < y0 + wh; ++y)
                for (int x = x0; x < x0 + ww; ++x) {
                    const double da = la[static_cast<std::size_t>(y) * w + x] - ma;
                    const double db = lb[static_cast<std::size_t>(y) * w + x] - mb;
                    va += da * da;
                    vb += db * db;
                    cov += da * db;
                }
            va /= n;
            vb /= n;
            cov /= n;
            total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++windows;
        }
    return total / static_cast<double>(windows);
}

std::vector<std::vector<double>> slice_similarity(const std::vector<GridSlice>& slices) {
    if (slices.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two slices");
    const std::size_t n = slices.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) m[i][j] = m[j][i] = ssim(slices[i].image, slices[j].image);
    return m;
}

} // namespace chartforge::modify
