#include "chartforge/evaluation.hpp"

#include "chartforge/error.hpp"
#include "chartforge/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace chartforge::eval {

std::size_t AxisTrace::defined_count() const {
    return static_cast<std::size_t>(std::count_if(y_of_x.begin(), y_of_x.end(), [](const auto& v) { return v.has_value(); }));
}

std::string_view to_string(MetricKind kind) {
    switch (kind) {
    case MetricKind::height: return "height";
    case MetricKind::trend: return "trend";
    case MetricKind::angle: return "angle";
    case MetricKind::size: return "size";
    }
    return "trend";
}

nlohmann::json to_json(const DistortionReport& r) {
    nlohmann::json windows = nlohmann::json::array();
    for (const auto& w : r.windows)
        windows.push_back({{"index", w.index}, {"x_range", {w.x_start, w.x_end}}, {"score", w.score}, {"active", w.active}});
    nlohmann::json boxes = nlohmann::json::array();
    for (const auto& b : r.error_boxes) boxes.push_back({{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}});
    return {{"global_score", r.global_score},
            {"metric_kind", to_string(r.metric_kind)},
            {"windows", windows},
            {"error_boxes", boxes}};
}

BinaryMask foreground(const RasterImage& image) {
    BinaryMask out(image.width(), image.height());
    if (image.empty()) return out;
    if (image.has_transparency()) {
        for (int y = 0; y < image.height(); ++y)
            for (int x = 0; x < image.width(); ++x) out.set(x, y, image.alpha(x, y) >= 128);
        return out;
    }
    const Rgba bg = image.at(0, 0);
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x) {
            const Rgba c = image.at(x, y);
            const int d = std::abs(c.r - bg.r) + std::abs(c.g - bg.g) + std::abs(c.b - bg.b);
            out.set(x, y, d > 48);
        }
    return out;
}

AxisTrace extract_axis(const BinaryMask& fg) {
    AxisTrace t;
    t.height = fg.height();
    t.y_of_x.resize(static_cast<std::size_t>(fg.width()));
    for (int x = 0; x < fg.width(); ++x) {
        double sum = 0.0;
        int n = 0;
        for (int y = 0; y < fg.height(); ++y)
            if (fg.at(x, y)) {
                sum += y;
                ++n;
            }
        if (n > 0) t.y_of_x[static_cast<std::size_t>(x)] = sum / n;
    }
    if (t.defined_count() == 0) throw Error(ErrorCode::EmptyForeground, "no foreground pixels");
    return t;
}

AxisTrace extract_axis(const RasterImage& image) { return extract_axis(foreground(image)); }

AxisTrace box_smooth(const AxisTrace& trace, int k) {
    if (k < 1 || k % 2 == 0) throw Error(ErrorCode::InvalidArgument, "box filter width must be odd and >= 1");
    const int n = static_cast<int>(trace.y_of_x.size());
    const int r = k / 2;
    AxisTrace out;
    out.height = trace.height;
    out.y_of_x.resize(trace.y_of_x.size());
    for (int i = 0; i < n; ++i) {
        if (!trace.y_of_x[static_cast<std::size_t>(i)]) continue;
        double sum = 0.0;
        int cnt = 0;
        for (int j = i - r; j <= i + r; ++j) {
            const auto& v = trace.y_of_x[static_cast<std::size_t>(std::clamp(j, 0, n - 1))];
            if (v) {
                sum += *v;
                ++cnt;
            }
        }
        out.y_of_x[static_cast<std::size_t>(i)] = sum / cnt;
    }
    return out;
}

double profile_value(double row, int height) {
    if (height <= 1) return 255.0;
    return 255.0 * (1.0 - row / (height - 1));
}

int window_width(int canvas_width, const EvalConfig& config) {
    return std::max(1, static_cast<int>(std::lround(config.window_fraction * canvas_width)));
}

DistortionReport score_traces(const AxisTrace& ref, const AxisTrace& gen, int canvas_width, const EvalConfig& config) {
    DistortionReport rep;
    rep.metric_kind = MetricKind::trend;
    const int ww = window_width(canvas_width, config);
    const int height = std::max(ref.height, gen.height);
    double sum = 0.0;
    int active = 0;
    auto at = [](const AxisTrace& t, int x) -> std::optional<double> {
        return x < static_cast<int>(t.y_of_x.size()) ? t.y_of_x[static_cast<std::size_t>(x)] : std::nullopt;
    };
    for (int start = 0, idx = 0; start < canvas_width; start += ww, ++idx) {
        const int end = std::min(start + ww, canvas_width);
        double rs = 0.0, gs = 0.0;
        int rn = 0, gn = 0;
        double top = 1e300, bottom = -1e300;
        for (int x = start; x < end; ++x) {
            if (auto v = at(ref, x)) {
                rs += profile_value(*v, ref.height);
                ++rn;
                top = std::min(top, *v);
                bottom = std::max(bottom, *v);
            }
            if (auto v = at(gen, x)) {
                gs += profile_value(*v, gen.height);
                ++gn;
                top = std::min(top, *v);
                bottom = std::max(bottom, *v);
            }
        }
        WindowScore w{idx, start, end, 1.0, rn > 0};
        if (rn > 0) {
            w.score = gn == 0 ? 0.0 : 1.0 - std::abs(rs / rn - gs / gn) / 255.0;
            w.score = std::clamp(w.score, 0.0, 1.0);
            sum += w.score;
            ++active;
            if (w.score < config.error_threshold) {
                const int y0 = std::max(0, static_cast<int>(std::floor(top)) - config.box_margin);
                const int y1 = std::min(height, static_cast<int>(std::ceil(bottom)) + 1 + config.box_margin);
                rep.error_boxes.push_back({start, y0, end - start, y1 - y0});
            }
        }
        rep.windows.push_back(w);
    }
    if (active == 0) throw Error(ErrorCode::EmptyForeground, "reference trace is empty");
    rep.global_score = sum / active;
    return rep;
}

DistortionReport trend_score(const RasterImage& chart, const RasterImage& generated, const EvalConfig& config) {
    if (chart.size() != generated.size()) throw Error(ErrorCode::SizeMismatch, "chart and generated sizes differ");
    const AxisTrace ref = box_smooth(extract_axis(chart), config.smooth_k);
    const AxisTrace gen = box_smooth(extract_axis(generated), config.smooth_k);
    return score_traces(ref, gen, chart.width(), config);
}

namespace {

double mark_score(double measured, double expected) {
    if (expected <= 0.0) return measured <= 0.0 ? 1.0 : 0.0;
    return std::clamp(1.0 - std::abs(measured - expected) / expected, 0.0, 1.0);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Bar height: median over the bar's central columns of the distance from the
// baseline to the farthest foreground row on the bar's side.
std::optional<double> bar_height(const BinaryMask& fg, const chart::BarRect& bar, int baseline) {
    const int x0 = bar.rect.x + bar.rect.w / 4;
    const int x1 = std::max(x0 + 1, bar.rect.right() - bar.rect.w / 4);
    std::vector<double> hs;
    for (int x = std::max(0, x0); x < std::min(x1, fg.width()); ++x) {
        if (bar.value >= 0) {
            for (int y = 0; y < std::min(baseline, fg.height()); ++y)
                if (fg.at(x, y)) {
                    hs.push_back(baseline - y);
                    break;
                }
        } else {
            for (int y = fg.height() - 1; y >= std::max(baseline, 0); --y)
                if (fg.at(x, y)) {
                    hs.push_back(y + 1 - baseline);
                    break;
                }
        }
    }
    if (hs.empty()) return std::nullopt;
    return median(hs);
}

constexpr int kAngleSteps = 4096;
constexpr std::array<double, 4> kRingFractions{0.35, 0.5, 0.65, 0.8};

// Angular extent of the foreground run through the sector's mid-angle,
// median over several rings.
std::optional<double> sector_extent(const BinaryMask& fg, const chart::PieSector& s) {
    const double step = 2.0 * std::numbers::pi / kAngleSteps;
    const long mid = std::lround(0.5 * (s.start_angle + s.end_angle) / step);
    std::vector<double> extents;
    for (double f : kRingFractions) {
        const double r = f * s.radius;
        auto on = [&](long k) {
            const double a = static_cast<double>(k) * step;
            const int x = static_cast<int>(std::floor(s.center.x + r * std::cos(a)));
            const int y = static_cast<int>(std::floor(s.center.y + r * std::sin(a)));
            return fg.get_or_zero(x, y);
        };
        if (!on(mid)) continue;
        long fwd = 1, bwd = 0;
        while (fwd < kAngleSteps && on(mid + fwd)) ++fwd;
        while (fwd + bwd < kAngleSteps && on(mid - bwd - 1)) ++bwd;
        extents.push_back(static_cast<double>(fwd + bwd) * step);
    }
    if (extents.empty()) return std::nullopt;
    return median(extents);
}

constexpr double kBubbleReach = 1.25;

std::optional<double> bubble_radius(const BinaryMask& fg, const chart::ScatterBubble& b) {
    const double reach = kBubbleReach * b.radius + 2.0;
    const int x0 = static_cast<int>(std::floor(b.center.x - reach)), x1 = static_cast<int>(std::ceil(b.center.x + reach));
    const int y0 = static_cast<int>(std::floor(b.center.y - reach)), y1 = static_cast<int>(std::ceil(b.center.y + reach));
    long count = 0;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            const double dx = x + 0.5 - b.center.x, dy = y + 0.5 - b.center.y;
            if (dx * dx + dy * dy <= reach * reach && fg.get_or_zero(x, y)) ++count;
        }
    if (count == 0) return std::nullopt;
    return std::sqrt(static_cast<double>(count) / std::numbers::pi);
}

} // namespace

DistortionReport mark_metric_score(const chart::ChartGeometry& geo, const RasterImage& generated, const EvalConfig& config) {
    if (geo.type == chart::ChartType::line)
        throw Error(ErrorCode::InvalidArgument, "line charts are scored with trend_score");
    if (generated.size() != geo.canvas) throw Error(ErrorCode::SizeMismatch, "generated size differs from the canvas");
    const BinaryMask fg = foreground(generated);
    const BinaryMask reference = chart::synthesize_mask(geo, chart::MaskVariant::solid_marks).pixels;

    DistortionReport rep;
    rep.metric_kind = geo.type == chart::ChartType::bar   ? MetricKind::height
                      : geo.type == chart::ChartType::pie ? MetricKind::angle
                                                          : MetricKind::size;
    double sum = 0.0;
    for (std::size_t i = 0; i < geo.marks.size(); ++i) {
        std::optional<double> measured, expected;
        const auto& shape = geo.marks[i].shape;
        Rect box = geo.mark_bounds(i);
        if (const auto* bar = std::get_if<chart::BarRect>(&shape)) {
            expected = bar->rect.h;
            if (bar->rect.h > 0) {
                measured = bar_height(fg, *bar, geo.baseline_y);
                if (measured) {
                    const int m = static_cast<int>(std::ceil(*measured));
                    const Rect reach = bar->value >= 0 ? Rect{bar->rect.x, geo.baseline_y - m, bar->rect.w, m}
                                                       : Rect{bar->rect.x, geo.baseline_y, bar->rect.w, m};
                    const int top = std::min(box.y, reach.y), bottom = std::max(box.bottom(), reach.bottom());
                    box = Rect{box.x, top, box.w, bottom - top};
                }
            } else {
                measured = bar_height(fg, *bar, geo.baseline_y).value_or(0.0);
            }
        } else if (const auto* sector = std::get_if<chart::PieSector>(&shape)) {
            expected = sector_extent(reference, *sector).value_or(0.0);
            measured = *expected > 0.0 ? sector_extent(fg, *sector) : sector_extent(fg, *sector).value_or(0.0);
        } else if (const auto* bubble = std::get_if<chart::ScatterBubble>(&shape)) {
            expected = bubble_radius(reference, *bubble).value_or(0.0);
            measured = *expected > 0.0 ? bubble_radius(fg, *bubble) : bubble_radius(fg, *bubble).value_or(0.0);
        }
        if (!measured) throw Error(ErrorCode::MarkNotFound, "no foreground near mark " + std::to_string(i));
        const double score = mark_score(*measured, *expected);
        rep.windows.push_back({static_cast<int>(i), box.x, box.right(), score, true});
        if (score < config.error_threshold) rep.error_boxes.push_back(box);
        sum += score;
    }
    rep.global_score = geo.marks.empty() ? 1.0 : sum / static_cast<double>(geo.marks.size());
    return rep;
}

namespace {

std::vector<double> sobel_magnitude(const RasterImage& img) {
    const int w = img.width(), h = img.height();
    std::vector<double> luma(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) luma[static_cast<std::size_t>(y) * w + x] = luminance(img.at(x, y));
    auto l = [&](int x, int y) {
        return luma[static_cast<std::size_t>(std::clamp(y, 0, h - 1)) * w + std::clamp(x, 0, w - 1)];
    };
    std::vector<double> mag(luma.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double gx = (l(x + 1, y - 1) + 2 * l(x + 1, y) + l(x + 1, y + 1)) -
                              (l(x - 1, y - 1) + 2 * l(x - 1, y) + l(x - 1, y + 1));
            const double gy = (l(x - 1, y + 1) + 2 * l(x, y + 1) + l(x + 1, y + 1)) -
                              (l(x - 1, y - 1) + 2 * l(x, y - 1) + l(x + 1, y - 1));
            mag[static_cast<std::size_t>(y) * w + x] = std::sqrt(gx * gx + gy * gy);
        }
    return mag;
}

// Otsu's threshold on a 256-bin histogram of values scaled by their maximum;
// returns the bin index t (edges are bins > t).
int otsu_bin(const std::vector<double>& values, double peak) {
    std::array<double, 256> hist{};
    for (double v : values) hist[static_cast<std::size_t>(std::min(255.0, std::floor(v / peak * 255.0)))] += 1.0;
    const double total = static_cast<double>(values.size());
    double sum_all = 0.0;
    for (int i = 0; i < 256; ++i) sum_all += i * hist[i];
    double w0 = 0.0, sum0 = 0.0, best = -1.0;
    int best_t = 0;
    for (int t = 0; t < 255; ++t) {
        w0 += hist[t];
        sum0 += t * hist[t];
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double m0 = sum0 / w0, m1 = (sum_all - sum0) / w1;
        const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if (between > best) {
            best = between;
            best_t = t;
        }
    }
    return best_t;
}

AxisTrace topmost_trace(const BinaryMask& m) {
    AxisTrace t;
    t.height = m.height();
    t.y_of_x.resize(static_cast<std::size_t>(m.width()));
    for (int x = 0; x < m.width(); ++x)
        for (int y = 0; y < m.height(); ++y)
            if (m.at(x, y)) {
                t.y_of_x[static_cast<std::size_t>(x)] = y;
                break;
            }
    return t;
}

} // namespace

DistortionReport background_score(const chart::ChartMask& mask, const RasterImage& generated, const EvalConfig& config) {
    if (mask.size() != generated.size()) throw Error(ErrorCode::SizeMismatch, "mask and generated sizes differ");
    const auto mag = sobel_magnitude(generated);
    const double peak = mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
    if (peak <= 0.0) throw Error(ErrorCode::NoEdgesFound, "generated image has no gradient");
    const int t = otsu_bin(mag, peak);
    const BinaryMask near = mask.pixels.dilate(config.mask_dilation);
    BinaryMask edges(generated.width(), generated.height());
    for (int y = 0; y < generated.height(); ++y)
        for (int x = 0; x < generated.width(); ++x) {
            const double bin = std::min(255.0, std::floor(mag[static_cast<std::size_t>(y) * generated.width() + x] / peak * 255.0));
            edges.set(x, y, bin > t && near.at(x, y));
        }
    if (!edges.any()) throw Error(ErrorCode::NoEdgesFound, "no edges near the chart mask");
    const AxisTrace ref = box_smooth(topmost_trace(mask.pixels), config.smooth_k);
    const AxisTrace gen = box_smooth(topmost_trace(edges), config.smooth_k);
    return score_traces(ref, gen, generated.width(), config);
}

DistortionReport evaluate(const chart::ChartGeometry& geometry, const RasterImage& generated, const EvalConfig& config) {
    if (geometry.type == chart::ChartType::line) return trend_score(chart::render_plain(geometry), generated, config);
    return mark_metric_score(geometry, generated, config);
}

} // namespace chartforge::eval
