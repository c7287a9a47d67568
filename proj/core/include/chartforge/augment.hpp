#pragma once

#include "chartforge/mask.hpp"

#include <cstdint>
#include <string_view>

namespace chartforge::chart {

enum class AugmentOp { gaussian_blur, motion_blur, warp };

std::string_view to_string(AugmentOp op);
AugmentOp augment_op_from_string(std::string_view name);

/// Parameters for all three operations; each op reads only its own fields.
///
/// Safe ranges (on canvases of 256 px and up the integrity guard holds for
/// every value inside them; augment() still checks):
///   gaussian_blur  sigma in [0, 2] px
///   motion_blur    length in [0, 4] px, angle in [0, pi)
///   warp           amplitude in [0, 4] px, wavelength >= 64 px
///
/// Longer blurs round off the acute corner where a filled line area ends.
///
/// The warp displaces every column vertically by
/// (amplitude / 2) * sin(2 pi x / wavelength + phase), i.e. `amplitude` is the
/// peak-to-peak excursion; the phase comes from the seed.
struct AugmentParams {
    double sigma = 0.0;
    double length = 0.0;
    double angle = 0.0;
    double amplitude = 0.0;
    double wavelength = 64.0;
};

inline constexpr double kMaxSigma = 2.0;
inline constexpr double kMaxMotionLength = 4.0;
inline constexpr double kMaxWarpAmplitude = 4.0;
inline constexpr double kMinWarpWavelength = 64.0;
/// Largest tolerated bar top-edge / line centroid displacement.
inline constexpr double kIntegrityTolerancePx = 2.0;

/// Blurs or warps the mask, re-binarizes at 0.5 and checks the data-integrity
/// guard (bar charts: per-bar top edge; line charts: per-column centroid).
/// Throws IntegrityViolated when the guard fails. Deterministic in all inputs.
ChartMask augment(const ChartMask& mask, AugmentOp op, const AugmentParams& params, std::uint64_t seed);

/// The transformation alone, without the guard.
BinaryMask apply_augmentation(const BinaryMask& mask, AugmentOp op, const AugmentParams& params, std::uint64_t seed);

/// Guard metric: the largest per-bar top-edge shift (bar charts) or per-column
/// centroid shift (line charts) between `before` and `after`, in pixels.
/// Infinity when marks disappear; 0 for chart types without a guard.
double integrity_shift(const ChartMask& before, const BinaryMask& after);

/// Draws an op's parameters uniformly from its safe range.
AugmentParams random_params(AugmentOp op, std::uint64_t seed);

} // namespace chartforge::chart
