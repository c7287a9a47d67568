#include "chartforge/pipeline.hpp"

#include "chartforge/augment.hpp"
#include "chartforge/error.hpp"

#include <algorithm>
#include <random>

namespace chartforge::server {

int object_side(Size canvas) { return std::min(canvas.width, canvas.height); }

chart::ChartMask augmented_mask(const chart::ChartGeometry& geometry, chart::MaskVariant variant, std::uint64_t seed) {
    const chart::ChartMask mask = chart::synthesize_mask(geometry, variant);
    std::mt19937_64 rng(seed ^ 0x5bd1e9955bd1e995ull);
    constexpr chart::AugmentOp ops[] = {chart::AugmentOp::gaussian_blur, chart::AugmentOp::motion_blur,
                                        chart::AugmentOp::warp};
    const chart::AugmentOp op = ops[rng() % 3];
    chart::AugmentParams params = chart::random_params(op, seed);
    for (int attempt = 0; attempt <= kAugmentRetries; ++attempt) {
        try {
            return chart::augment(mask, op, params, seed);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::IntegrityViolated) throw;
        }
        params.sigma /= 2;
        params.length /= 2;
        params.amplitude /= 2;
    }
    return mask;
}

namespace {

gen::GenRequest txt2img(const GenerationOptions& o, Size size) {
    gen::GenRequest r;
    r.prompt_object = o.object;
    r.prompt_description = o.description;
    r.mode = gen::GenMode::txt2img;
    r.seed = o.seed;
    r.size = size;
    return r;
}

gen::GenRequest img2img(const GenerationOptions& o, RasterImage init, double strength) {
    gen::GenRequest r = txt2img(o, init.size());
    r.mode = gen::GenMode::img2img;
    r.init_image = std::move(init);
    r.strength = strength;
    return r;
}

chart::MaskVariant pick_variant(const chart::ChartGeometry& geometry, const GenerationOptions& o) {
    const chart::MaskVariant v = o.mask_variant.value_or(chart::default_variant(geometry.type));
    if (!chart::variant_compatible(geometry.type, v))
        throw Error(ErrorCode::IncompatibleVariant, std::string(chart::to_string(v)) + " does not fit a " +
                                                        std::string(chart::to_string(geometry.type)) + " chart");
    return v;
}

FlowOutput unconditional_foreground(const GenerationOptions& o, const chart::ChartGeometry& geometry,
                                    gen::GenClient& client, const attention::SegmentationProvider* segmenter) {
    const int side = object_side(geometry.canvas);
    FlowOutput out;
    out.request = txt2img(o, {side, side});
    const gen::GenResult res = client.generate(out.request);
    const attention::ObjectMask m = attention::threshold_mask(res.object_attention(out.request));
    if (m.count() == 0) throw Error(ErrorCode::EmptyMask, "attention for '" + o.object + "' has no above-mean cell");
    const attention::ExtractedObject coarse = attention::apply_mask(m, res.image);
    out.image = attention::refine_object(coarse, segmenter).image;
    out.support = attention::upsample_mask(m, res.image.size());
    return out;
}

FlowOutput unconditional_background(const GenerationOptions& o, const chart::ChartGeometry& geometry,
                                    gen::GenClient& client) {
    FlowOutput out;
    out.request = txt2img(o, geometry.canvas);
    out.image = client.generate(out.request).image;
    return out;
}

FlowOutput conditional_foreground(const GenerationOptions& o, const chart::ChartGeometry& geometry,
                                  gen::GenClient& client) {
    const chart::ChartMask mask = augmented_mask(geometry, pick_variant(geometry, o), o.seed);
    const gen::GenRequest probe = txt2img(o, geometry.canvas);
    const gen::GenResult probed = client.generate(probe);
    attention::FusedConditionImage fused = attention::fuse_foreground_marks(mask, probed.object_attention(probe));

    FlowOutput out;
    out.request = img2img(o, attention::to_raster(fused), kConditionStrength);
    out.image = client.generate(out.request).image;
    for (int y = 0; y < out.image.height(); ++y)
        for (int x = 0; x < out.image.width(); ++x) out.image.set_alpha(x, y, mask.pixels.at(x, y) ? 255 : 0);
    out.condition = std::move(fused);
    out.support = mask.pixels;
    return out;
}

FlowOutput conditional_background(const GenerationOptions& o, const chart::ChartGeometry& geometry,
                                  gen::GenClient& client) {
    const chart::ChartMask mask = chart::synthesize_mask(geometry, pick_variant(geometry, o));
    const gen::GenRequest probe = txt2img(o, geometry.canvas);
    const gen::GenResult probed = client.generate(probe);
    const Rgb color = attention::dominant_color(probed.object_attention(probe), probed.image);
    attention::FusedConditionImage fused = attention::fuse_background(mask.pixels, color);

    FlowOutput out;
    out.request = img2img(o, attention::to_raster(fused), kConditionStrength);
    out.image = client.generate(out.request).image;
    out.condition = std::move(fused);
    out.support = mask.pixels;
    return out;
}

} // namespace

FlowOutput run_flow(const chart::ChartGeometry& geometry, const GenerationOptions& options, gen::GenClient& client,
                    const attention::SegmentationProvider* segmenter) {
    if (options.object.empty()) throw Error(ErrorCode::InvalidRequest, "object prompt is empty");
    if (options.target == GenTarget::foreground)
        return options.method == GenMethod::conditional ? conditional_foreground(options, geometry, client)
                                                        : unconditional_foreground(options, geometry, client, segmenter);
    return options.method == GenMethod::conditional ? conditional_background(options, geometry, client)
                                                    : unconditional_background(options, geometry, client);
}

std::vector<modify::ReplicatedMark> run_replication(const chart::ChartGeometry& geometry, const RasterImage& element,
                                                    const std::optional<modify::ReplicationPlan>& plan,
                                                    gen::GenClient& client, const modify::PromptContext& prompt,
                                                    double strength) {
    const modify::ReplicationPlan p = plan ? *plan : modify::plan_replication(geometry);
    if (geometry.type != chart::ChartType::bar)
        throw Error(ErrorCode::UnsupportedChartType, "replication is defined for bar charts only");
    p.validate(geometry);

    Rect box{0, 0, element.width(), element.height()};
    if (element.has_transparency()) {
        BinaryMask opaque(element.width(), element.height());
        for (int y = 0; y < element.height(); ++y)
            for (int x = 0; x < element.width(); ++x) opaque.set(x, y, element.alpha(x, y) > 0);
        if (!opaque.any()) throw Error(ErrorCode::EmptyForeground, "element is fully transparent");
        box = opaque.bounding_box();
    }
    const Rect source = std::get<chart::BarRect>(geometry.marks[p.source_bar].shape).rect;
    if (source.h < p.slice_count) throw Error(ErrorCode::TooShort, "source bar is shorter than the slice count");
    const RasterImage fitted = modify::resize_bilinear(element.crop(box), {source.w, source.h});
    return modify::replicate(fitted, p, geometry, client, strength, prompt);
}

} // namespace chartforge::server
