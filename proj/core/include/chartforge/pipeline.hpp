#pragma once

#include "chartforge/attention.hpp"
#include "chartforge/fusion.hpp"
#include "chartforge/genclient.hpp"
#include "chartforge/geometry.hpp"
#include "chartforge/mask.hpp"
#include "chartforge/modification.hpp"
#include "chartforge/project.hpp"

#include <optional>

// The four generation flows and the replication flow. These are the only
// places where modules are composed.
namespace chartforge::server {

/// img2img strength used by the two conditional flows.
inline constexpr double kConditionStrength = 0.6;
/// Strength of the seam-merging pass during replication.
inline constexpr double kReplicationStrength = 0.3;
/// Attempts at shrinking augmentation parameters before giving up on them.
inline constexpr int kAugmentRetries = 3;

struct FlowOutput {
    RasterImage image;
    /// Final backend request (init image included for img2img).
    gen::GenRequest request;
    /// Condition fed to img2img (conditional flows).
    std::optional<attention::FusedConditionImage> condition;
    /// Mask the condition was built on (conditional flows) or the upsampled
    /// attention footprint (unconditional foreground).
    std::optional<BinaryMask> support;
};

/// Square side used for unconditional foreground objects.
int object_side(Size canvas);

/// Dispatches on target x method. Throws IncompatibleVariant, EmptyMask,
/// MissingAttention and backend errors.
FlowOutput run_flow(const chart::ChartGeometry& geometry, const GenerationOptions& options, gen::GenClient& client,
                    const attention::SegmentationProvider* segmenter = nullptr);

/// Chart mask after the seeded augmentation used by the conditional
/// foreground flow (unaugmented if no shrunken parameter set passes the guard).
chart::ChartMask augmented_mask(const chart::ChartGeometry& geometry, chart::MaskVariant variant, std::uint64_t seed);

/// Crops `element` to its opaque bounding box, fits it to the source bar and
/// replicates it onto every target bar. Throws UnsupportedChartType,
/// InvalidPlan, EmptyForeground.
std::vector<modify::ReplicatedMark> run_replication(const chart::ChartGeometry& geometry, const RasterImage& element,
                                                    const std::optional<modify::ReplicationPlan>& plan,
                                                    gen::GenClient& client, const modify::PromptContext& prompt,
                                                    double strength = kReplicationStrength);

} // namespace chartforge::server
