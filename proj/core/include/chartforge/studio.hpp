#pragma once

#include "chartforge/evaluation.hpp"
#include "chartforge/genclient.hpp"
#include "chartforge/modification.hpp"
#include "chartforge/project.hpp"
#include "chartforge/semantics.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace chartforge::server {

struct StudioOptions {
    std::filesystem::path data_dir = "chartforge-data";
    std::shared_ptr<gen::GenClient> client; // defaults to the mock
    std::shared_ptr<const semantics::EmbeddingTable> corpus;
    std::shared_ptr<const semantics::KeywordProvider> keywords;          // defaults to rarity scoring
    std::shared_ptr<const attention::SegmentationProvider> segmenter; // defaults to the built-in fallback
    std::size_t related_count = 5;
};

/// Reads CHARTFORGE_DATA_DIR and CHARTFORGE_BACKEND_URL.
StudioOptions options_from_environment();

struct SemanticsView {
    semantics::KeywordSet keywords;
    std::map<std::string, std::vector<semantics::RelatedTerm>> related;
};

struct ExportResult {
    std::vector<std::uint8_t> bytes;
    std::string content_type;
};

/// Project service behind the HTTP API and the CLI. Mutations of one project
/// are serialized; reads take a shared lock and see a consistent snapshot.
class Studio {
  public:
    explicit Studio(StudioOptions options);

    Project create_project(std::string data, chart::TableFormat format, chart::ChartSpec spec,
                           std::optional<std::string> title = std::nullopt);
    Project project(const std::string& id) const;
    SemanticsView semantics(const std::string& id) const;

    /// Runs the flow, stores result (and condition) assets, appends the gallery
    /// entry and a layer: foreground on top, background at the bottom.
    GalleryEntry generate(const std::string& id, const GenerationOptions& options);

    /// Replicates a gallery entry's element over the bars; returns one asset
    /// per bar (source included) and adds one element layer per bar.
    std::vector<std::pair<std::size_t, std::string>> replicate(const std::string& id, const std::string& entry,
                                                               const std::optional<modify::ReplicationPlan>& plan);

    /// Low-strength img2img over the visible raster composite; returns the
    /// new asset. Throws NoLayers.
    std::string refine(const std::string& id, double strength, std::uint64_t seed);

    /// Scores one layer, or the visible element composite when `layer` is
    /// empty. Background layers go through background_score.
    eval::DistortionReport evaluate(const std::string& id, const std::optional<std::string>& layer) const;

    /// "png" (visible raster layers composited at canvas size) or "layered"
    /// (JSON document with the layer stack and embedded assets).
    ExportResult export_project(const std::string& id, const std::string& format) const;

    LayerStack set_layers(const std::string& id, LayerStack layers);
    GalleryEntry set_kept(const std::string& id, const std::string& entry, bool kept);

    ProjectStore::Asset asset(const std::string& asset_id) const;
    const ProjectStore& store() const { return store_; }
    gen::GenClient& client() { return *options_.client; }

    /// Visible raster layers of the given kinds drawn onto a transparent
    /// canvas, bottom first, nearest-neighbour sampling.
    RasterImage composite(const Project& project, bool include_background) const;

  private:
    struct Slot {
        mutable std::shared_mutex mutex;
        Project project;
    };
    std::shared_ptr<Slot> slot(const std::string& id) const;
    void commit(Slot& slot) const;

    StudioOptions options_;
    ProjectStore store_;
    mutable std::mutex slots_mutex_;
    mutable std::map<std::string, std::shared_ptr<Slot>> slots_;
};

/// Draws `asset` through `transform` onto `canvas` with source-over blending.
void draw_layer(RasterImage& canvas, const RasterImage& asset, const Transform& transform);

} // namespace chartforge::server
