#pragma once

#include "chartforge/attention.hpp"
#include "chartforge/mask.hpp"
#include "chartforge/raster.hpp"

#include <array>
#include <vector>

namespace chartforge::attention {

/// Rotation about the canvas centre followed by isotropic scaling.
struct AffineParams {
    double theta = 0.0; // radians
    double scale = 1.0;
    friend bool operator==(const AffineParams&, const AffineParams&) = default;
};

inline constexpr int kThetaSteps = 19; // theta_i = (i - 9) * pi / 36
inline constexpr int kScaleSteps = 21; // s_j = (10 + j) / 20

double search_theta(int i);
double search_scale(int j);

/// Inverse map of output pixel (x, y) on a `target` canvas. With
/// c = ((W - 1) / 2, (H - 1) / 2) and d = (x, y) - c:
///   qx = cx + ( cos(theta) * dx + sin(theta) * dy) / s
///   qy = cy + (-sin(theta) * dx + cos(theta) * dy) / s
/// Returns false when q lies outside [-0.5, W - 0.5) x [-0.5, H - 0.5).
bool source_position(Size target, const AffineParams& p, int x, int y, double& qx, double& qy);

/// Transformed upsampled attention at (x, y): grid_value_at(q), 0 off-canvas.
double transformed_value(const AttentionGrid& grid, Size target, const AffineParams& p, int x, int y);

/// Transformed attention footprint at (x, y): mask_value_at(q) >= 0.5, false
/// off-canvas.
bool transformed_footprint(const ObjectMask& footprint, Size target, const AffineParams& p, int x, int y);

/// Number of set pixels of `mask` also covered by the transformed footprint.
/// The footprint is binary, so the objective is a pixel count and exact.
double fusion_objective(const ObjectMask& footprint, const BinaryMask& mask, const AffineParams& p);

/// One fused region (the whole canvas, or one mark's neighbourhood).
struct RegionFusion {
    Rect region;
    AffineParams params;
    double objective = 0.0;
};

/// Conditional image in [0, 1]; zero outside the chart mask.
struct FusedConditionImage {
    FloatImage pixels;
    AffineParams params; // best parameters (of the first region for per-mark fusion)
    double objective = 0.0;
    std::vector<RegionFusion> regions;
};

/// Exhaustive search over the 19 x 21 rotation/scale lattice for the transform
/// maximizing fusion_objective with the footprint threshold_mask(grid). Ties go
/// to the smaller |theta|, then the smaller |s - 1|, then the earlier lattice
/// point. The output is mask * transformed attention / grid maximum.
/// Throws EmptyMask when the mask has no set pixel.
FusedConditionImage fuse_foreground(const BinaryMask& mask, const AttentionGrid& grid);
FusedConditionImage fuse_foreground(const chart::ChartMask& mask, const AttentionGrid& grid);

/// Margin added around every mark when fusing marks independently.
inline constexpr int kMarkFusionMargin = 8;

/// Fuses the attention separately into each mark's neighbourhood so that every
/// bar, sector or bubble receives a full copy of the object.
FusedConditionImage fuse_foreground_marks(const chart::ChartMask& mask, const AttentionGrid& grid);

/// Three-channel condition image: `color` / 255 inside the mask, 0 outside.
/// Throws EmptyMask.
FusedConditionImage fuse_background(const BinaryMask& mask, Rgb color);

/// Quantizes a condition image for img2img input (grey for one channel).
RasterImage to_raster(const FusedConditionImage& image);

} // namespace chartforge::attention
