#pragma once

#include "chartforge/genclient.hpp"
#include "chartforge/geometry.hpp"
#include "chartforge/raster.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace chartforge::modify {

struct GridSlice {
    RasterImage image;
    int index = 0;
    int original_height = 0;
};

inline constexpr int kDefaultSliceCount = 5;

/// Splits `element` into `count` horizontal bands; the first H % count bands
/// are one pixel taller. Throws TooShort when H < count.
std::vector<GridSlice> cut_grids(const RasterImage& element, int count = kDefaultSliceCount);

/// Stacks images top to bottom. Throws SizeMismatch on differing widths.
RasterImage concat_vertical(const std::vector<RasterImage>& parts);
RasterImage concat_slices(const std::vector<GridSlice>& slices);

inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;
inline constexpr double kSsimRange = 255.0;
inline constexpr int kSsimWindow = 8;

/// Mean single-scale SSIM on Rec. 601 luma over all 8x8 windows (stride 1,
/// population statistics). Images of unequal height are compared over their
/// common top rows; windows shrink to the image when it is smaller than 8.
/// Throws SizeMismatch when the widths differ.
double ssim(const RasterImage& a, const RasterImage& b);

/// Symmetric matrix of pairwise SSIM, unit diagonal. Throws InvalidArgument
/// with fewer than two slices.
std::vector<std::vector<double>> slice_similarity(const std::vector<GridSlice>& slices);

/// Per-slice weights: mean SSIM against the other slices, floored at 0 and
/// normalized to sum 1 (uniform when every mean is <= 0).
std::vector<double> editability_weights(const std::vector<std::vector<double>>& similarity);

/// Integer slice heights summing to `target_height`. The height change is
/// shared out in proportion to `weights`; slices that would go negative are
/// pinned at 0 and the remainder redistributed. Rounding uses largest
/// remainders.
std::vector<int> allocate_heights(const std::vector<int>& heights, const std::vector<double>& weights, int target_height);

/// Rescales every slice vertically to its allocated height and concatenates.
/// Output is exactly target_height tall and as wide as the slices.
RasterImage warp_to_height(const std::vector<GridSlice>& slices, int target_height);

/// Vertical bilinear resample, pixel-centre aligned; all four channels.
RasterImage resize_vertical(const RasterImage& image, int height);
/// Bilinear resample in both directions, pixel-centre aligned.
RasterImage resize_bilinear(const RasterImage& image, Size size);

/// Prompt context for low-strength image-to-image passes.
struct PromptContext {
    std::string object;
    std::string description;
    std::uint64_t seed = 0;
};

inline constexpr double kMaxRefineStrength = 0.5;

/// Low-strength img2img over the warped stack. Keeps the input's alpha.
/// Throws InvalidArgument unless strength is in [0, 0.5].
RasterImage merge_seams(const RasterImage& warped, gen::GenClient& client, double strength, const PromptContext& prompt);

/// Same contract as merge_seams, applied to a whole composite.
RasterImage refine_canvas(const RasterImage& composite, gen::GenClient& client, double strength,
                          const PromptContext& prompt);

struct ReplicationPlan {
    std::size_t source_bar = 0;
    std::vector<std::pair<std::size_t, int>> targets; // (mark index, target height)
    int slice_count = kDefaultSliceCount;

    /// Throws InvalidPlan when a target is taller than the source bar or
    /// refers to a missing mark.
    void validate(const chart::ChartGeometry& geometry) const;
};

/// Tallest bar as the source; every other bar as a target at its own height.
/// Throws UnsupportedChartType for non-bar charts.
ReplicationPlan plan_replication(const chart::ChartGeometry& geometry, int slice_count = kDefaultSliceCount);

struct ReplicatedMark {
    std::size_t mark = 0;
    RasterImage image;
};

/// Cuts `element` (already fitted to the source bar), warps a copy to every
/// target height and merges seams with seed + mark index. The source bar gets
/// the element itself.
std::vector<ReplicatedMark> replicate(const RasterImage& element, const ReplicationPlan& plan,
                                      const chart::ChartGeometry& geometry, gen::GenClient& client, double strength,
                                      const PromptContext& prompt);

} // namespace chartforge::modify
