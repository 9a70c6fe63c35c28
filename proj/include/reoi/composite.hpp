#pragma once

#include <optional>
#include <vector>

#include "reoi/distractor.hpp"
#include "reoi/types.hpp"

namespace reoi::composite {

using distractor::Segment;

struct Layer {
    Mask mask;
    Frame pixels;  // valid under mask
    double depth_key = 0;  // larger = closer to camera
};

struct LayerStack {
    std::vector<Layer> layers;
    Frame background;
};

enum class DepthSource { initial_obs, predicted_frame };

/// Depth key of a segment: bottom-most mask row / H. For initial-observation
/// layers a simulator depth map, when available, breaks ties between layers
/// with the same bottom row (strictly below the 1/H row quantum).
double assign_depth(const Segment& seg, DepthSource source,
                    const std::vector<int32_t>* depth_map, int h, int w);

/// Split a frame into color-segment layers plus a gripper layer; the
/// background is the frame with every layer mask inpainted.
LayerStack decompose(const Frame& frame);

/// Paint layers over the background in ascending depth_key order
/// (ties by layer index).
Frame composite(const LayerStack& stack);

/// Re-add frozen distractor layers (pixels and masks from t=0) to each
/// predicted frame: decompose, append, composite.
std::vector<Frame> reinsert(const std::vector<Frame>& predicted,
                            const std::vector<Layer>& distractor_layers);

/// Distractor layers for the flagged segments of a report, with
/// initial-observation depth keys.
std::vector<Layer> extract_layers(const Frame& frame, const distractor::IdentificationReport& rep,
                                  const std::vector<int32_t>* depth_map = nullptr);

}  // namespace reoi::composite
