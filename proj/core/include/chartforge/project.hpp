#pragma once

#include "chartforge/geometry.hpp"
#include "chartforge/mask.hpp"
#include "chartforge/table.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chartforge::server {

using nlohmann::json;

enum class LayerKind { annotation, element, background };
std::string_view to_string(LayerKind kind);
LayerKind layer_kind_from_string(std::string_view name);

/// Asset pixel q lands on canvas point t + S c + R(rotation) S (q - c), where
/// c is the asset centre and S = diag(scale_x, scale_y).
struct Transform {
    double translate_x = 0;
    double translate_y = 0;
    double rotation = 0; // radians
    double scale_x = 1;
    double scale_y = 1;

    /// Throws InvalidArgument on a zero or non-finite scale.
    void validate() const;
    friend bool operator==(const Transform&, const Transform&) = default;
};

struct Layer {
    std::string id;
    std::string asset;
    LayerKind kind = LayerKind::element;
    Transform transform;
    bool visible = true;
    friend bool operator==(const Layer&, const Layer&) = default;
};

/// Bottom-most layer first.
struct LayerStack {
    std::vector<Layer> layers;

    const Layer* find(std::string_view id) const;
    void validate() const;
    friend bool operator==(const LayerStack&, const LayerStack&) = default;
};

enum class GenTarget { foreground, background };
enum class GenMethod { conditional, unconditional };
std::string_view to_string(GenTarget t);
std::string_view to_string(GenMethod m);
GenTarget gen_target_from_string(std::string_view name); // also accepts fg / bg
GenMethod gen_method_from_string(std::string_view name); // also accepts cond / uncond

/// Everything needed to rerun a generation flow.
struct GenerationOptions {
    std::string object;
    std::string description;
    GenTarget target = GenTarget::foreground;
    GenMethod method = GenMethod::conditional;
    std::optional<chart::MaskVariant> mask_variant;
    std::uint64_t seed = 0;
    friend bool operator==(const GenerationOptions&, const GenerationOptions&) = default;
};

struct GalleryEntry {
    std::string id;
    GenerationOptions options;
    json request; // final backend request, init image replaced by its asset id
    std::string result_asset;
    std::optional<std::string> condition_asset;
    bool kept = true;
};

struct Project {
    std::string id;
    std::string data;                // uploaded bytes, re-parsed on load
    chart::TableFormat format = chart::TableFormat::csv;
    chart::DataTable table;
    chart::ChartSpec spec;
    LayerStack layers;
    std::vector<GalleryEntry> gallery;
    std::string preview_asset;
    std::string annotation_asset;
    std::string created;
    std::string modified;
    int next_asset = 0;

    const GalleryEntry* find_entry(std::string_view id) const;
    GalleryEntry* find_entry(std::string_view id);
};

json to_json(const Transform& t);
Transform transform_from_json(const json& j);
json to_json(const Layer& l);
Layer layer_from_json(const json& j);
json to_json(const LayerStack& s);
LayerStack layer_stack_from_json(const json& j);
json to_json(const GenerationOptions& o);
GenerationOptions options_from_json(const json& j);
json to_json(const GalleryEntry& e);
GalleryEntry gallery_entry_from_json(const json& j);
json to_json(const chart::ChartSpec& s);
chart::ChartSpec spec_from_json(const json& j);
/// Metadata only (no data bytes, no table).
json to_json(const Project& p);

/// 128 random bits as 32 lower-case hex digits.
std::string random_id();
/// Current UTC time, ISO 8601.
std::string timestamp_now();

/// One directory per project under {root}/projects/{id}: project.json, the
/// uploaded data file and assets/{asset}.png|svg. Asset ids are
/// "{project}_{sequence:04}".
class ProjectStore {
  public:
    explicit ProjectStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path project_dir(std::string_view id) const;

    void save(const Project& project) const;
    /// Throws NotFound.
    Project load(std::string_view id) const;
    bool exists(std::string_view id) const;

    std::string add_png(Project& project, const RasterImage& image) const;
    std::string add_svg(Project& project, const std::string& svg) const;

    struct Asset {
        std::vector<std::uint8_t> bytes;
        std::string content_type;
    };
    /// Throws NotFound.
    Asset read_asset(std::string_view asset_id) const;
    RasterImage read_png_asset(std::string_view asset_id) const;
    bool is_svg(std::string_view asset_id) const;

  private:
    std::filesystem::path asset_path(std::string_view asset_id, std::string_view ext) const;
    std::filesystem::path root_;
};

} // namespace chartforge::server
