#pragma once

#include <vector>

#include "reoi/sim.hpp"
#include "reoi/types.hpp"
#include "reoi/wm.hpp"

namespace reoi::distractor {

inline constexpr int kMinSegmentArea = 12;
inline constexpr int kCheckFrameIndex = 5;  // compare frame0 vs 5th predicted frame
inline constexpr double kDefaultTau = 0.6;
inline constexpr int kQuantLevels = 12;

struct Segment {
    int id = 0;
    Mask mask;
    Rect bbox;
    Rgb mean_color = {0, 0, 0};
    int area = 0;
};

struct IdentificationReport {
    std::vector<Segment> segments;
    std::vector<double> scores;  // per segment, [0, 1]
    std::vector<int> flagged;    // segment ids with score < tau, after exemptions
    int check_frame_index = kCheckFrameIndex;

    const Segment* find(int id) const {
        for (const auto& s : segments)
            if (s.id == id) return &s;
        return nullptr;
    }
};

/// Quantized color triple on a 12-level-per-channel grid.
std::array<int, 3> quantize(const Rgb& c);

/// 4-connected components of equal quantized color, excluding background and
/// gripper colors; components below min_area are dropped. Segments are
/// ordered by bbox top-left and numbered from 1.
std::vector<Segment> segment(const Frame& frame, int min_area = kMinSegmentArea);

/// Pixels matching the reserved gripper color family: near-neutral and dark.
/// Works on both rendered frames and decoded predictions, where the gripper
/// appears as a mid-gray smudge.
Mask gripper_color_mask(const Frame& frame);

/// Fixed in-distribution hold-position plan (6 null actions).
sim::ActionPlan safety_check_plan(const sim::TaskSpec& task);

/// Masked SSIM between the segment's region in frame0 and frameK, clamped
/// to [0, 1]. Bounding box dilated by 2 px.
double persistence_score(const Segment& seg, const Frame& frame0, const Frame& frameK);

/// Roll out the safety-check plan, score every frame0 segment against the
/// check frame, and flag low-persistence segments. Exempt: segments touching
/// the gripper, segments matching the task target color, and the goal
/// container color.
IdentificationReport identify(const wm::WorldModel& model, const Frame& frame0,
                              const sim::TaskSpec& task, double tau = kDefaultTau);

/// Harmonic fill: masked pixels initialized to the mean of the mask's outer
/// boundary, then Jacobi-iterated to the mean of their 4-neighbors until
/// max-change < 1e-4 or 500 iterations. Pixels outside the mask are
/// bit-identical to the input. Throws on an all-true mask.
Frame inpaint(const Frame& frame, const Mask& mask);

}  // namespace reoi::distractor
