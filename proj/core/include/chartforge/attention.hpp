#pragma once

#include "chartforge/raster.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace chartforge::attention {

/// Query, key and value projections; `dim` is the projection width shared by
/// queries and keys and scales the logits by 1/sqrt(dim).
struct AttentionInputs {
    Eigen::MatrixXd queries; // n_q x dim
    Eigen::MatrixXd keys;    // n_k x dim
    Eigen::MatrixXd values;  // n_k x c
    int dim = 1;
};

struct AttentionResult {
    Eigen::MatrixXd output; // n_q x c, scores * values
    Eigen::MatrixXd scores; // n_q x n_k, each row sums to 1
};

/// softmax(Q K^T / sqrt(d)) V with the row maximum subtracted before
/// exponentiation. Throws DimensionMismatch on inconsistent shapes.
AttentionResult cross_attention(const AttentionInputs& inputs);

/// Side length of the cross-attention grid taken from the middle UNet layer.
inline constexpr int kGridSide = 16;

/// N x N non-negative attention for one prompt token, row-major.
struct AttentionGrid {
    int side = kGridSide;
    std::vector<double> values;
    std::string token;

    AttentionGrid() = default;
    AttentionGrid(int n, std::vector<double> v, std::string t = {});

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * side + col]; }
    double mean() const;
    /// Throws InvalidArgument unless the grid is square, finite and >= 0.
    void validate() const;
};

/// Thresholded attention footprint, N x N.
struct ObjectMask {
    int side = kGridSide;
    std::vector<std::uint8_t> bits;

    bool at(int row, int col) const { return bits[static_cast<std::size_t>(row) * side + col] != 0; }
    std::size_t count() const;
    friend bool operator==(const ObjectMask&, const ObjectMask&) = default;
};

/// bit = 1 where the attention is strictly above the grid mean. A uniform grid
/// therefore yields an all-zero mask.
ObjectMask threshold_mask(const AttentionGrid& grid);

/// Bilinear interpolation of the grid at continuous pixel position (x, y) of a
/// `target`-sized raster, pixel-centre aligned and clamped at the borders:
///   u = (x + 0.5) * N / W - 0.5,  v = (y + 0.5) * N / H - 0.5.
double grid_value_at(const AttentionGrid& grid, Size target, double x, double y);

/// Attention resampled to `target` (values are not binarized).
FloatImage upsample(const AttentionGrid& grid, Size target);

/// Bilinear interpolation of the mask bits with the same alignment as
/// grid_value_at; in [0, 1].
double mask_value_at(const ObjectMask& mask, Size target, double x, double y);

/// Mask resampled bilinearly to `target`, then re-binarized at 0.5.
BinaryMask upsample_mask(const ObjectMask& mask, Size target);

struct ExtractedObject {
    RasterImage image;
    bool coarse = true;
};

/// Cuts the object out of a generated image: colour copied, alpha 255 inside
/// the upsampled mask and 0 outside. Throws NonSquareImage.
ExtractedObject apply_mask(const ObjectMask& mask, const RasterImage& image);

/// External matting service: returns one alpha value per pixel, row-major.
class SegmentationProvider {
  public:
    virtual ~SegmentationProvider() = default;
    virtual std::vector<std::uint8_t> alpha_matte(const RasterImage& image) const = 0;
};

/// Removes leftover background from a coarse cut-out. With a provider the
/// provider's matte is intersected (min) with the coarse alpha; without one the
/// largest 4-connected opaque component is kept and its rim feathered to half
/// alpha. Output alpha never exceeds input alpha.
ExtractedObject refine_object(const ExtractedObject& object, const SegmentationProvider* provider = nullptr);

/// Attention-weighted mean colour of pixels whose upsampled attention exceeds
/// the grid mean; the plain mean colour when no pixel qualifies.
Rgb dominant_color(const AttentionGrid& grid, const RasterImage& image);

} // namespace chartforge::attention
