#include "chartforge/project.hpp"

#include "chartforge/error.hpp"
#include "chartforge/png_io.hpp"

#include <openssl/rand.h>

#include <cctype>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace chartforge::server {

namespace fs = std::filesystem;

std::string_view to_string(LayerKind kind) {
    switch (kind) {
    case LayerKind::annotation: return "annotation";
    case LayerKind::element: return "element";
    case LayerKind::background: return "background";
    }
    return "element";
}

LayerKind layer_kind_from_string(std::string_view name) {
    if (name == "annotation") return LayerKind::annotation;
    if (name == "element") return LayerKind::element;
    if (name == "background") return LayerKind::background;
    throw Error(ErrorCode::InvalidArgument, "unknown layer kind '" + std::string(name) + "'");
}

std::string_view to_string(GenTarget t) { return t == GenTarget::foreground ? "foreground" : "background"; }
std::string_view to_string(GenMethod m) { return m == GenMethod::conditional ? "conditional" : "unconditional"; }

GenTarget gen_target_from_string(std::string_view name) {
    if (name == "foreground" || name == "fg") return GenTarget::foreground;
    if (name == "background" || name == "bg") return GenTarget::background;
    throw Error(ErrorCode::InvalidArgument, "unknown target '" + std::string(name) + "'");
}

GenMethod gen_method_from_string(std::string_view name) {
    if (name == "conditional" || name == "cond") return GenMethod::conditional;
    if (name == "unconditional" || name == "uncond") return GenMethod::unconditional;
    throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

void Transform::validate() const {
    for (double v : {translate_x, translate_y, rotation, scale_x, scale_y})
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "transform values must be finite");
    if (scale_x == 0.0 || scale_y == 0.0) throw Error(ErrorCode::InvalidArgument, "layer scale must be non-zero");
}

const Layer* LayerStack::find(std::string_view id) const {
    for (const auto& l : layers)
        if (l.id == id) return &l;
    return nullptr;
}

void LayerStack::validate() const {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        layers[i].transform.validate();
        if (layers[i].id.empty() || layers[i].asset.empty())
            throw Error(ErrorCode::InvalidArgument, "layer needs an id and an asset");
        for (std::size_t j = 0; j < i; ++j)
            if (layers[j].id == layers[i].id) throw Error(ErrorCode::InvalidArgument, "duplicate layer id " + layers[i].id);
    }
}

const GalleryEntry* Project::find_entry(std::string_view id) const {
    for (const auto& e : gallery)
        if (e.id == id) return &e;
    return nullptr;
}

GalleryEntry* Project::find_entry(std::string_view id) {
    for (auto& e : gallery)
        if (e.id == id) return &e;
    return nullptr;
}

namespace {

template <typename F>
auto guarded(std::string_view what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string(what) + ": " + e.what());
    }
}

} // namespace

json to_json(const Transform& t) {
    return {{"translate", {t.translate_x, t.translate_y}}, {"rotation", t.rotation}, {"scale", {t.scale_x, t.scale_y}}};
}

Transform transform_from_json(const json& j) {
    return guarded("transform", [&] {
        Transform t;
        if (j.contains("translate")) {
            t.translate_x = j["translate"].at(0).get<double>();
            t.translate_y = j["translate"].at(1).get<double>();
        }
        t.rotation = j.value("rotation", 0.0);
        if (j.contains("scale")) {
            t.scale_x = j["scale"].at(0).get<double>();
            t.scale_y = j["scale"].at(1).get<double>();
        }
        t.validate();
        return t;
    });
}

json to_json(const Layer& l) {
    return {{"id", l.id}, {"asset", l.asset}, {"kind", to_string(l.kind)}, {"transform", to_json(l.transform)},
            {"visible", l.visible}};
}

Layer layer_from_json(const json& j) {
    return guarded("layer", [&] {
        Layer l;
        l.id = j.at("id").get<std::string>();
        l.asset = j.at("asset").get<std::string>();
        l.kind = layer_kind_from_string(j.at("kind").get<std::string>());
        if (j.contains("transform")) l.transform = transform_from_json(j["transform"]);
        l.visible = j.value("visible", true);
        return l;
    });
}

json to_json(const LayerStack& s) {
    json arr = json::array();
    for (const auto& l : s.layers) arr.push_back(to_json(l));
    return arr;
}

LayerStack layer_stack_from_json(const json& j) {
    if (!j.is_array()) throw Error(ErrorCode::InvalidArgument, "layers must be an array");
    LayerStack s;
    for (const auto& l : j) s.layers.push_back(layer_from_json(l));
    s.validate();
    return s;
}

json to_json(const GenerationOptions& o) {
    json j{{"object", o.object}, {"description", o.description}, {"target", to_string(o.target)},
           {"method", to_string(o.method)}, {"seed", o.seed}};
    j["mask_variant"] = o.mask_variant ? json(chart::to_string(*o.mask_variant)) : json(nullptr);
    return j;
}

GenerationOptions options_from_json(const json& j) {
    return guarded("generation options", [&] {
        GenerationOptions o;
        o.object = j.at("object").get<std::string>();
        o.description = j.value("description", std::string{});
        o.target = gen_target_from_string(j.value("target", std::string{"foreground"}));
        o.method = gen_method_from_string(j.value("method", std::string{"conditional"}));
        if (j.contains("mask_variant") && !j["mask_variant"].is_null())
            o.mask_variant = chart::mask_variant_from_string(j["mask_variant"].get<std::string>());
        o.seed = j.value("seed", std::uint64_t{0});
        return o;
    });
}

json to_json(const GalleryEntry& e) {
    json j{{"id", e.id}, {"options", to_json(e.options)}, {"request", e.request}, {"result_asset", e.result_asset},
           {"kept", e.kept}};
    j["condition_asset"] = e.condition_asset ? json(*e.condition_asset) : json(nullptr);
    return j;
}

GalleryEntry gallery_entry_from_json(const json& j) {
    return guarded("gallery entry", [&] {
        GalleryEntry e;
        e.id = j.at("id").get<std::string>();
        e.options = options_from_json(j.at("options"));
        e.request = j.value("request", json::object());
        e.result_asset = j.at("result_asset").get<std::string>();
        if (j.contains("condition_asset") && !j["condition_asset"].is_null())
            e.condition_asset = j["condition_asset"].get<std::string>();
        e.kept = j.value("kept", true);
        return e;
    });
}

json to_json(const chart::ChartSpec& s) {
    json j{{"chart_type", chart::to_string(s.chart_type)},
           {"x_column", s.x_column},
           {"y_column", s.y_column},
           {"canvas", {s.canvas.width, s.canvas.height}},
           {"aspect_ratio", {s.aspect_ratio.num, s.aspect_ratio.den}}};
    j["size_column"] = s.size_column ? json(*s.size_column) : json(nullptr);
    if (s.plot_area) j["plot_area"] = {s.plot_area->x, s.plot_area->y, s.plot_area->w, s.plot_area->h};
    return j;
}

chart::ChartSpec spec_from_json(const json& j) {
    return guarded("chart spec", [&] {
        chart::ChartSpec s;
        s.chart_type = chart::chart_type_from_string(j.value("chart_type", std::string{"bar"}));
        s.x_column = j.value("x_column", std::string{});
        s.y_column = j.value("y_column", std::string{});
        if (j.contains("size_column") && !j["size_column"].is_null()) s.size_column = j["size_column"].get<std::string>();
        if (j.contains("canvas")) s.canvas = {j["canvas"].at(0).get<int>(), j["canvas"].at(1).get<int>()};
        if (j.contains("aspect_ratio"))
            s.aspect_ratio = {j["aspect_ratio"].at(0).get<int>(), j["aspect_ratio"].at(1).get<int>()};
        if (j.contains("plot_area") && !j["plot_area"].is_null()) {
            const auto& p = j["plot_area"];
            s.plot_area = Rect{p.at(0).get<int>(), p.at(1).get<int>(), p.at(2).get<int>(), p.at(3).get<int>()};
        }
        return s;
    });
}

json to_json(const Project& p) {
    json gallery = json::array();
    for (const auto& e : p.gallery) gallery.push_back(to_json(e));
    json j{{"id", p.id},
           {"format", chart::to_string(p.format)},
           {"spec", to_json(p.spec)},
           {"layers", to_json(p.layers)},
           {"gallery", gallery},
           {"preview_asset", p.preview_asset},
           {"annotation_asset", p.annotation_asset},
           {"created", p.created},
           {"modified", p.modified},
           {"next_asset", p.next_asset}};
    j["title"] = p.table.title ? json(*p.table.title) : json(nullptr);
    return j;
}

std::string random_id() {
    unsigned char bytes[16];
    if (RAND_bytes(bytes, sizeof bytes) != 1) throw Error(ErrorCode::IoError, "random source failed");
    std::ostringstream os;
    os << std::hex << std::setfill('0');
    for (unsigned char b : bytes) os << std::setw(2) << static_cast<int>(b);
    return os.str();
}

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

namespace {

bool valid_token(std::string_view s) {
    if (s.empty() || s.size() > 64) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

std::string data_file_name(chart::TableFormat f) { return f == chart::TableFormat::csv ? "data.csv" : "data.json"; }

} // namespace

ProjectStore::ProjectStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_ / "projects"); }

fs::path ProjectStore::project_dir(std::string_view id) const {
    if (!valid_token(id)) throw Error(ErrorCode::NotFound, "project '" + std::string(id) + "'");
    return root_ / "projects" / std::string(id);
}

bool ProjectStore::exists(std::string_view id) const {
    return valid_token(id) && fs::exists(project_dir(id) / "project.json");
}

void ProjectStore::save(const Project& p) const {
    const fs::path dir = project_dir(p.id);
    fs::create_directories(dir / "assets");
    const std::string meta = to_json(p).dump(2) + "\n";
    const fs::path tmp = dir / "project.json.tmp";
    write_file(tmp, {reinterpret_cast<const std::uint8_t*>(meta.data()), meta.size()});
    fs::rename(tmp, dir / "project.json");
    const fs::path data = dir / data_file_name(p.format);
    if (!fs::exists(data)) write_file(data, {reinterpret_cast<const std::uint8_t*>(p.data.data()), p.data.size()});
}

Project ProjectStore::load(std::string_view id) const {
    if (!exists(id)) throw Error(ErrorCode::NotFound, "project '" + std::string(id) + "'");
    const fs::path dir = project_dir(id);
    const auto meta_bytes = read_file(dir / "project.json");
    json j;
    try {
        j = json::parse(meta_bytes.begin(), meta_bytes.end());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::IoError, "corrupt project.json: " + std::string(e.what()));
    }
    return guarded("project.json", [&] {
        Project p;
        p.id = j.at("id").get<std::string>();
        p.format = chart::table_format_from_string(j.at("format").get<std::string>());
        const auto data = read_file(dir / data_file_name(p.format));
        p.data.assign(data.begin(), data.end());
        p.table = chart::parse_table(p.data, p.format);
        if (j.contains("title") && !j["title"].is_null()) p.table.title = j["title"].get<std::string>();
        p.spec = spec_from_json(j.at("spec"));
        p.layers = layer_stack_from_json(j.at("layers"));
        for (const auto& e : j.at("gallery")) p.gallery.push_back(gallery_entry_from_json(e));
        p.preview_asset = j.at("preview_asset").get<std::string>();
        p.annotation_asset = j.at("annotation_asset").get<std::string>();
        p.created = j.value("created", std::string{});
        p.modified = j.value("modified", std::string{});
        p.next_asset = j.at("next_asset").get<int>();
        return p;
    });
}

fs::path ProjectStore::asset_path(std::string_view asset_id, std::string_view ext) const {
    const auto sep = asset_id.find('_');
    if (!valid_token(asset_id) || sep == std::string_view::npos)
        throw Error(ErrorCode::NotFound, "asset '" + std::string(asset_id) + "'");
    return project_dir(asset_id.substr(0, sep)) / "assets" / (std::string(asset_id) + std::string(ext));
}

std::string ProjectStore::add_png(Project& project, const RasterImage& image) const {
    std::ostringstream os;
    os << project.id << '_' << std::setw(4) << std::setfill('0') << project.next_asset++;
    const std::string id = os.str();
    const fs::path path = asset_path(id, ".png");
    fs::create_directories(path.parent_path());
    write_png(path, image);
    return id;
}

std::string ProjectStore::add_svg(Project& project, const std::string& svg) const {
    std::ostringstream os;
    os << project.id << '_' << std::setw(4) << std::setfill('0') << project.next_asset++;
    const std::string id = os.str();
    const fs::path path = asset_path(id, ".svg");
    fs::create_directories(path.parent_path());
    write_file(path, {reinterpret_cast<const std::uint8_t*>(svg.data()), svg.size()});
    return id;
}

bool ProjectStore::is_svg(std::string_view asset_id) const { return fs::exists(asset_path(asset_id, ".svg")); }

ProjectStore::Asset ProjectStore::read_asset(std::string_view asset_id) const {
    for (auto [ext, type] : {std::pair{".png", "image/png"}, std::pair{".svg", "image/svg+xml"}}) {
        const fs::path p = asset_path(asset_id, ext);
        if (fs::exists(p)) return {read_file(p), type};
    }
    throw Error(ErrorCode::NotFound, "asset '" + std::string(asset_id) + "'");
}

RasterImage ProjectStore::read_png_asset(std::string_view asset_id) const {
    const fs::path p = asset_path(asset_id, ".png");
    if (!fs::exists(p)) throw Error(ErrorCode::NotFound, "raster asset '" + std::string(asset_id) + "'");
    return read_png(p);
}

} // namespace chartforge::server
