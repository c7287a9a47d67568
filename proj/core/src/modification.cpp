#include "chartforge/modification.hpp"

#include "chartforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chartforge::modify {

std::vector<GridSlice> cut_grids(const RasterImage& element, int count) {
    if (count < 1) throw Error(ErrorCode::InvalidArgument, "slice count must be >= 1");
    if (element.height() < count)
        throw Error(ErrorCode::TooShort, "element of height " + std::to_string(element.height()) + " cannot make " +
                                             std::to_string(count) + " slices");
    std::vector<GridSlice> out;
    const int base = element.height() / count;
    const int extra = element.height() % count;
    int y = 0;
    for (int i = 0; i < count; ++i) {
        const int h = base + (i < extra ? 1 : 0);
        out.push_back({element.crop({0, y, element.width(), h}), i, h});
        y += h;
    }
    return out;
}

RasterImage concat_vertical(const std::vector<RasterImage>& parts) {
    int w = -1, h = 0;
    for (const auto& p : parts) {
        if (p.height() == 0) continue;
        if (w >= 0 && p.width() != w) throw Error(ErrorCode::SizeMismatch, "parts differ in width");
        w = p.width();
        h += p.height();
    }
    if (w < 0) return {};
    RasterImage out(w, h);
    int y = 0;
    for (const auto& p : parts) {
        if (p.height() == 0) continue;
        out.paste(p, 0, y);
        y += p.height();
    }
    return out;
}

RasterImage concat_slices(const std::vector<GridSlice>& slices) {
    std::vector<RasterImage> parts;
    parts.reserve(slices.size());
    for (const auto& s : slices) parts.push_back(s.image);
    return concat_vertical(parts);
}

std::vector<double> editability_weights(const std::vector<std::vector<double>>& sim) {
    const std::size_t n = sim.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) s += sim[i][j];
        w[i] = n > 1 ? std::max(s / static_cast<double>(n - 1), 0.0) : 1.0;
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (total <= 0.0) return std::vector<double>(n, 1.0 / static_cast<double>(n));
    for (double& x : w) x /= total;
    return w;
}

std::vector<int> allocate_heights(const std::vector<int>& heights, const std::vector<double>& weights, int target) {
    const std::size_t n = heights.size();
    if (n == 0 || weights.size() != n) throw Error(ErrorCode::InvalidArgument, "heights and weights must match");
    if (target < 0) throw Error(ErrorCode::InvalidArgument, "target height must be >= 0");

    std::vector<double> real(n, 0.0);
    std::vector<bool> pinned(n, false);
    for (;;) {
        double active_h = 0.0, active_w = 0.0;
        std::size_t active = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (!pinned[i]) {
                active_h += heights[i];
                active_w += weights[i];
                ++active;
            }
        const double delta = target - active_h;
        bool pinned_any = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (pinned[i]) continue;
            const double share = active_w > 0.0 ? weights[i] / active_w : 1.0 / static_cast<double>(active);
            real[i] = heights[i] + delta * share;
            if (real[i] < 0.0) {
                pinned[i] = true;
                real[i] = 0.0;
                pinned_any = true;
            }
        }
        if (!pinned_any) break;
    }

    std::vector<int> out(n);
    int assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = static_cast<int>(std::floor(real[i]));
        assigned += out[i];
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return real[a] - out[a] > real[b] - out[b]; });
    for (std::size_t k = 0; assigned < target; k = (k + 1) % n) {
        ++out[order[k]];
        ++assigned;
    }
    return out;
}

namespace {

double source_coord(int dst, int dst_len, int src_len) {
    const double s = (dst + 0.5) * src_len / dst_len - 0.5;
    return std::clamp(s, 0.0, static_cast<double>(src_len - 1));
}

} // namespace

RasterImage resize_vertical(const RasterImage& image, int height) {
    return resize_bilinear(image, {image.width(), height});
}

RasterImage resize_bilinear(const RasterImage& image, Size size) {
    if (size.width <= 0 || size.height <= 0 || image.empty()) return RasterImage(std::max(size.width, 0), std::max(size.height, 0));
    if (size == image.size()) return image;
    RasterImage out(size.width, size.height);
    for (int y = 0; y < size.height; ++y) {
        const double sy = source_coord(y, size.height, image.height());
        const int y0 = static_cast<int>(std::floor(sy));
        const int y1 = std::min(y0 + 1, image.height() - 1);
        const double ty = sy - y0;
        for (int x = 0; x < size.width; ++x) {
            const double sx = source_coord(x, size.width, image.width());
            const int x0 = static_cast<int>(std::floor(sx));
            const int x1 = std::min(x0 + 1, image.width() - 1);
            const double tx = sx - x0;
            const Rgba a = image.at(x0, y0), b = image.at(x1, y0), c = image.at(x0, y1), d = image.at(x1, y1);
            auto mix = [&](std::uint8_t pa, std::uint8_t pb, std::uint8_t pc, std::uint8_t pd) {
                const double top = pa * (1.0 - tx) + pb * tx;
                const double bottom = pc * (1.0 - tx) + pd * tx;
                return clamp_to_byte(top * (1.0 - ty) + bottom * ty);
            };
            out.set(x, y, {mix(a.r, b.r, c.r, d.r), mix(a.g, b.g, c.g, d.g), mix(a.b, b.b, c.b, d.b), mix(a.a, b.a, c.a, d.a)});
        }
    }
    return out;
}

RasterImage warp_to_height(const std::vector<GridSlice>& slices, int target_height) {
    if (target_height < 1) throw Error(ErrorCode::InvalidArgument, "target height must be >= 1");
    if (slices.empty()) throw Error(ErrorCode::InvalidArgument, "no slices");
    std::vector<int> heights;
    for (const auto& s : slices) heights.push_back(s.image.height());
    const std::vector<double> weights =
        slices.size() > 1 ? editability_weights(slice_similarity(slices)) : std::vector<double>{1.0};
    const std::vector<int> alloc = allocate_heights(heights, weights, target_height);
    std::vector<RasterImage> parts;
    for (std::size_t i = 0; i < slices.size(); ++i)
        if (alloc[i] > 0) parts.push_back(resize_vertical(slices[i].image, alloc[i]));
    return concat_vertical(parts);
}

RasterImage merge_seams(const RasterImage& warped, gen::GenClient& client, double strength, const PromptContext& prompt) {
    if (!(strength >= 0.0 && strength <= kMaxRefineStrength))
        throw Error(ErrorCode::InvalidArgument, "strength must be in [0, 0.5]");
    gen::GenRequest req;
    req.prompt_object = prompt.object;
    req.prompt_description = prompt.description;
    req.mode = gen::GenMode::img2img;
    req.init_image = warped;
    req.strength = strength;
    req.seed = prompt.seed;
    req.size = warped.size();
    RasterImage out = client.generate(req).image;
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x) out.set_alpha(x, y, warped.alpha(x, y));
    return out;
}

RasterImage refine_canvas(const RasterImage& composite, gen::GenClient& client, double strength,
                          const PromptContext& prompt) {
    return merge_seams(composite, client, strength, prompt);
}

void ReplicationPlan::validate(const chart::ChartGeometry& geometry) const {
    auto bar_height = [&](std::size_t i) {
        if (i >= geometry.marks.size()) throw Error(ErrorCode::InvalidPlan, "mark " + std::to_string(i) + " does not exist");
        const auto* bar = std::get_if<chart::BarRect>(&geometry.marks[i].shape);
        if (!bar) throw Error(ErrorCode::InvalidPlan, "mark " + std::to_string(i) + " is not a bar");
        return bar->rect.h;
    };
    if (slice_count < 1) throw Error(ErrorCode::InvalidPlan, "slice count must be >= 1");
    const int source_h = bar_height(source_bar);
    for (const auto& [mark, h] : targets) {
        bar_height(mark);
        if (h > source_h)
            throw Error(ErrorCode::InvalidPlan, "target height " + std::to_string(h) + " exceeds source bar height " +
                                                    std::to_string(source_h));
        if (h < 0) throw Error(ErrorCode::InvalidPlan, "negative target height");
    }
}

ReplicationPlan plan_replication(const chart::ChartGeometry& geometry, int slice_count) {
    if (geometry.type != chart::ChartType::bar)
        throw Error(ErrorCode::UnsupportedChartType, "replication is defined for bar charts only");
    ReplicationPlan plan;
    plan.slice_count = slice_count;
    int best = -1;
    for (std::size_t i = 0; i < geometry.marks.size(); ++i) {
        const int h = std::get<chart::BarRect>(geometry.marks[i].shape).rect.h;
        if (h > best) {
            best = h;
            plan.source_bar = i;
        }
    }
    if (best < 0) throw Error(ErrorCode::InvalidPlan, "chart has no bars");
    for (std::size_t i = 0; i < geometry.marks.size(); ++i)
        if (i != plan.source_bar) plan.targets.emplace_back(i, std::get<chart::BarRect>(geometry.marks[i].shape).rect.h);
    plan.validate(geometry);
    return plan;
}

std::vector<ReplicatedMark> replicate(const RasterImage& element, const ReplicationPlan& plan,
                                      const chart::ChartGeometry& geometry, gen::GenClient& client, double strength,
                                      const PromptContext& prompt) {
    plan.validate(geometry);
    const auto slices = cut_grids(element, plan.slice_count);
    std::vector<ReplicatedMark> out;
    out.push_back({plan.source_bar, element});
    for (const auto& [mark, h] : plan.targets) {
        if (h < 1) continue;
        const RasterImage warped = warp_to_height(slices, h);
        PromptContext p = prompt;
        p.seed = prompt.seed + mark;
        out.push_back({mark, merge_seams(warped, client, strength, p)});
    }
    return out;
}

} // namespace chartforge::modify
