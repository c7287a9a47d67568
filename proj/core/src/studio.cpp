#include "chartforge/studio.hpp"

#include "chartforge/annotations.hpp"
#include "chartforge/error.hpp"
#include "chartforge/pipeline.hpp"
#include "chartforge/png_io.hpp"
#include "chartforge/render.hpp"
#include "chartforge/wire.hpp"

#include <cmath>
#include <cstdlib>

namespace chartforge::server {

StudioOptions options_from_environment() {
    StudioOptions o;
    if (const char* dir = std::getenv("CHARTFORGE_DATA_DIR"); dir && *dir) o.data_dir = dir;
    const gen::BackendDescriptor d = gen::descriptor_from_environment();
    o.client = std::make_shared<gen::GenClient>(d);
    if (!d.is_mock()) {
        o.keywords = std::make_shared<gen::HttpKeywordProvider>(d);
        o.segmenter = std::make_shared<gen::HttpSegmentationProvider>(d);
    }
    return o;
}

Studio::Studio(StudioOptions options) : options_(std::move(options)), store_(options_.data_dir) {
    if (!options_.client) options_.client = std::make_shared<gen::GenClient>(std::make_shared<gen::MockBackend>());
    if (!options_.keywords) options_.keywords = std::make_shared<semantics::RarityKeywordProvider>(options_.corpus.get());
}

std::shared_ptr<Studio::Slot> Studio::slot(const std::string& id) const {
    std::lock_guard lock(slots_mutex_);
    if (auto it = slots_.find(id); it != slots_.end()) return it->second;
    auto s = std::make_shared<Slot>();
    s->project = store_.load(id);
    slots_.emplace(id, s);
    return s;
}

void Studio::commit(Slot& s) const {
    s.project.modified = timestamp_now();
    store_.save(s.project);
}

namespace {

chart::ChartGeometry geometry_of(const Project& p) { return chart::derive_geometry(p.table, p.spec); }

Layer make_layer(const std::string& asset, LayerKind kind, Transform t = {}) {
    return Layer{"layer_" + asset, asset, kind, t, true};
}

} // namespace

Project Studio::create_project(std::string data, chart::TableFormat format, chart::ChartSpec spec,
                               std::optional<std::string> title) {
    auto s = std::make_shared<Slot>();
    Project& p = s->project;
    p.table = chart::parse_table(data, format);
    if (title) p.table.title = *title;
    p.spec = chart::with_default_columns(std::move(spec), p.table);
    p.spec.validate(p.table);
    const chart::ChartGeometry geo = geometry_of(p);

    p.id = random_id();
    p.data = std::move(data);
    p.format = format;
    p.created = timestamp_now();
    p.preview_asset = store_.add_png(p, chart::render_plain(geo));
    p.annotation_asset = store_.add_svg(p, chart::export_annotations(geo, p.table, p.spec));
    p.layers.layers = {make_layer(p.preview_asset, LayerKind::element),
                       make_layer(p.annotation_asset, LayerKind::annotation)};
    commit(*s);
    std::lock_guard lock(slots_mutex_);
    slots_.emplace(p.id, s);
    return p;
}

Project Studio::project(const std::string& id) const {
    auto s = slot(id);
    std::shared_lock lock(s->mutex);
    return s->project;
}

SemanticsView Studio::semantics(const std::string& id) const {
    const Project p = project(id);
    SemanticsView view;
    if (!p.table.title || p.table.title->empty()) return view;
    view.keywords = semantics::extract_keywords(*p.table.title, *options_.keywords);
    if (options_.corpus)
        for (const auto& k : view.keywords.keywords) {
            try {
                view.related[k.term] = semantics::related_terms(k.term, *options_.corpus, options_.related_count);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::UnknownWord) throw;
            }
        }
    return view;
}

GalleryEntry Studio::generate(const std::string& id, const GenerationOptions& options) {
    auto s = slot(id);
    std::unique_lock lock(s->mutex);
    Project& p = s->project;
    const chart::ChartGeometry geo = geometry_of(p);
    const FlowOutput out = run_flow(geo, options, *options_.client, options_.segmenter.get());

    GalleryEntry e;
    e.options = options;
    e.result_asset = store_.add_png(p, out.image);
    e.id = "entry_" + e.result_asset;
    e.request = wire::request_to_json(out.request);
    e.request["init_image"] = nullptr;
    if (out.condition) {
        e.condition_asset = store_.add_png(p, attention::to_raster(*out.condition));
        e.request["init_asset"] = *e.condition_asset;
    }
    p.gallery.push_back(e);

    if (options.target == GenTarget::background) {
        p.layers.layers.insert(p.layers.layers.begin(), make_layer(e.result_asset, LayerKind::background));
    } else {
        Transform t;
        t.translate_x = (geo.canvas.width - out.image.width()) / 2.0;
        t.translate_y = (geo.canvas.height - out.image.height()) / 2.0;
        p.layers.layers.push_back(make_layer(e.result_asset, LayerKind::element, t));
    }
    commit(*s);
    return e;
}

std::vector<std::pair<std::size_t, std::string>> Studio::replicate(const std::string& id, const std::string& entry,
                                                                   const std::optional<modify::ReplicationPlan>& plan) {
    auto s = slot(id);
    std::unique_lock lock(s->mutex);
    Project& p = s->project;
    const GalleryEntry* e = p.find_entry(entry);
    if (!e) throw Error(ErrorCode::NotFound, "gallery entry '" + entry + "'");
    const chart::ChartGeometry geo = geometry_of(p);
    if (geo.type != chart::ChartType::bar)
        throw Error(ErrorCode::UnsupportedChartType, "replication is defined for bar charts only");
    const RasterImage element = store_.read_png_asset(e->result_asset);
    const modify::PromptContext prompt{e->options.object, e->options.description, e->options.seed};
    const auto marks = run_replication(geo, element, plan, *options_.client, prompt);

    std::vector<std::pair<std::size_t, std::string>> out;
    for (const auto& m : marks) {
        const std::string asset = store_.add_png(p, m.image);
        const auto& bar = std::get<chart::BarRect>(geo.marks[m.mark].shape);
        Transform t;
        t.translate_x = bar.rect.x;
        t.translate_y = bar.value >= 0 ? geo.baseline_y - m.image.height() : geo.baseline_y;
        p.layers.layers.push_back(make_layer(asset, LayerKind::element, t));
        out.emplace_back(m.mark, asset);
    }
    commit(*s);
    return out;
}

RasterImage Studio::composite(const Project& p, bool include_background) const {
    RasterImage canvas(p.spec.canvas.width, p.spec.canvas.height);
    for (const auto& l : p.layers.layers) {
        if (!l.visible || l.kind == LayerKind::annotation) continue;
        if (l.kind == LayerKind::background && !include_background) continue;
        if (store_.is_svg(l.asset)) continue;
        draw_layer(canvas, store_.read_png_asset(l.asset), l.transform);
    }
    return canvas;
}

namespace {

bool has_raster_layer(const Project& p, const ProjectStore& store, bool include_background) {
    for (const auto& l : p.layers.layers)
        if (l.visible && l.kind != LayerKind::annotation && (include_background || l.kind != LayerKind::background) &&
            !store.is_svg(l.asset))
            return true;
    return false;
}

} // namespace

std::string Studio::refine(const std::string& id, double strength, std::uint64_t seed) {
    auto s = slot(id);
    std::unique_lock lock(s->mutex);
    Project& p = s->project;
    if (!has_raster_layer(p, store_, true)) throw Error(ErrorCode::NoLayers, "nothing visible to refine");
    const RasterImage canvas = composite(p, true);
    const modify::PromptContext prompt{p.table.title.value_or("chart"), "", seed};
    const RasterImage refined = modify::refine_canvas(canvas, *options_.client, strength, prompt);
    const std::string asset = store_.add_png(p, refined);
    commit(*s);
    return asset;
}

eval::DistortionReport Studio::evaluate(const std::string& id, const std::optional<std::string>& layer) const {
    const Project p = project(id);
    const chart::ChartGeometry geo = geometry_of(p);
    if (!layer) {
        if (!has_raster_layer(p, store_, false)) throw Error(ErrorCode::NoLayers, "no visible element layers");
        return eval::evaluate(geo, composite(p, false));
    }
    const Layer* l = p.layers.find(*layer);
    if (!l) throw Error(ErrorCode::NotFound, "layer '" + *layer + "'");
    if (l->kind == LayerKind::annotation || store_.is_svg(l->asset))
        throw Error(ErrorCode::InvalidArgument, "annotation layers cannot be evaluated");
    RasterImage canvas(geo.canvas.width, geo.canvas.height);
    draw_layer(canvas, store_.read_png_asset(l->asset), l->transform);
    if (l->kind == LayerKind::background)
        return eval::background_score(chart::synthesize_mask(geo, chart::default_variant(geo.type)), canvas);
    return eval::evaluate(geo, canvas);
}

ExportResult Studio::export_project(const std::string& id, const std::string& format) const {
    const Project p = project(id);
    if (format == "png") {
        if (!has_raster_layer(p, store_, true)) throw Error(ErrorCode::NoLayers, "nothing visible to export");
        return {encode_png(composite(p, true)), "image/png"};
    }
    if (format == "layered" || format == "json") {
        wire::json assets = wire::json::object();
        for (const auto& l : p.layers.layers) {
            const auto a = store_.read_asset(l.asset);
            const bool svg = a.content_type == "image/svg+xml";
            assets[l.asset] = {{"content_type", a.content_type},
                               {"data", svg ? wire::json(std::string(a.bytes.begin(), a.bytes.end()))
                                            : wire::json(wire::base64_encode(a.bytes))}};
        }
        const wire::json doc{{"project", p.id},
                             {"canvas", {p.spec.canvas.width, p.spec.canvas.height}},
                             {"layers", to_json(p.layers)},
                             {"assets", assets}};
        const std::string text = doc.dump(2);
        return {std::vector<std::uint8_t>(text.begin(), text.end()), "application/json"};
    }
    throw Error(ErrorCode::UnsupportedFormat, "export format '" + format + "'");
}

LayerStack Studio::set_layers(const std::string& id, LayerStack layers) {
    layers.validate();
    auto s = slot(id);
    std::unique_lock lock(s->mutex);
    Project& p = s->project;
    for (const auto& l : layers.layers) {
        if (l.asset.rfind(p.id + "_", 0) != 0)
            throw Error(ErrorCode::InvalidArgument, "layer asset '" + l.asset + "' belongs to another project");
        store_.read_asset(l.asset);
    }
    p.layers = std::move(layers);
    commit(*s);
    return p.layers;
}

GalleryEntry Studio::set_kept(const std::string& id, const std::string& entry, bool kept) {
    auto s = slot(id);
    std::unique_lock lock(s->mutex);
    GalleryEntry* e = s->project.find_entry(entry);
    if (!e) throw Error(ErrorCode::NotFound, "gallery entry '" + entry + "'");
    e->kept = kept;
    const GalleryEntry copy = *e;
    commit(*s);
    return copy;
}

ProjectStore::Asset Studio::asset(const std::string& asset_id) const { return store_.read_asset(asset_id); }

void draw_layer(RasterImage& canvas, const RasterImage& asset, const Transform& t) {
    t.validate();
    if (asset.empty()) return;
    const double cx = asset.width() / 2.0, cy = asset.height() / 2.0;
    const double c = std::cos(t.rotation), s = std::sin(t.rotation);
    // Forward map of asset point q: p = t + S c + R S (q - c).
    auto forward = [&](double qx, double qy) {
        const double dx = t.scale_x * (qx - cx), dy = t.scale_y * (qy - cy);
        return std::pair{t.translate_x + t.scale_x * cx + c * dx - s * dy, t.translate_y + t.scale_y * cy + s * dx + c * dy};
    };
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (auto [qx, qy] : {std::pair{0.0, 0.0}, {double(asset.width()), 0.0}, {0.0, double(asset.height())},
                          {double(asset.width()), double(asset.height())}}) {
        const auto [px, py] = forward(qx, qy);
        x0 = std::min(x0, px);
        y0 = std::min(y0, py);
        x1 = std::max(x1, px);
        y1 = std::max(y1, py);
    }
    const int bx0 = std::max(0, static_cast<int>(std::floor(x0))), by0 = std::max(0, static_cast<int>(std::floor(y0)));
    const int bx1 = std::min(canvas.width(), static_cast<int>(std::ceil(x1)));
    const int by1 = std::min(canvas.height(), static_cast<int>(std::ceil(y1)));
    for (int y = by0; y < by1; ++y)
        for (int x = bx0; x < bx1; ++x) {
            const double dx = x + 0.5 - t.translate_x - t.scale_x * cx;
            const double dy = y + 0.5 - t.translate_y - t.scale_y * cy;
            const double qx = cx + (c * dx + s * dy) / t.scale_x;
            const double qy = cy + (-s * dx + c * dy) / t.scale_y;
            const int ix = static_cast<int>(std::floor(qx)), iy = static_cast<int>(std::floor(qy));
            if (ix < 0 || iy < 0 || ix >= asset.width() || iy >= asset.height()) continue;
            canvas.set(x, y, blend_over(canvas.at(x, y), asset.at(ix, iy)));
        }
}

} // namespace chartforge::server
