#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "reoi/rng.hpp"
#include "reoi/types.hpp"

namespace reoi::sim {

// Environment constants. Object palettes are split so that novel-category
// colors are genuinely outside the color statistics of the training scenes:
// every training color, the background and the gripper satisfy
// G == (R+B)/2, while novel colors carry a large green offset off that
// subspace. Both palettes keep an L-inf separation of at least 0.25.
inline constexpr int kImageSize = 64;
inline constexpr float kVMax = 6.0f;        // px per tick
inline constexpr float kPickupRadius = 5.0f;
inline constexpr Rgb kBackground = {0.7f, 0.7f, 0.7f};
inline constexpr Rgb kGripperColor = {0.1f, 0.1f, 0.1f};
inline constexpr float kGripperHalf = 3.0f;  // 7x7 footprint

const std::vector<Rgb>& training_palette();
const std::vector<Rgb>& novel_palette();
/// Index into training_palette() reserved for the goal container.
inline constexpr int kContainerColorIndex = 1;

enum class Shape { circle, rect, triangle };
enum class Category { training, novel };
enum class Role { target, obstacle, distractor, container };

std::string to_string(Shape s);
std::string to_string(Category c);
std::string to_string(Role r);

struct ObjectSpec {
    int id = 0;
    Shape shape = Shape::circle;
    Rgb color = {0, 0, 0};
    float row = 0, col = 0;  // center, pixels
    float size = 0;          // radius / half-extent
    int depth_rank = 0;      // higher = closer to camera
    Category category = Category::training;
    Role role = Role::obstacle;
};

struct Action {
    float dx = 0;  // moves row, [-1, 1]
    float dy = 0;  // moves col, [-1, 1]
    int grip = 0;  // commanded grip state
};
using ActionPlan = std::vector<Action>;

struct TaskSpec {
    std::string instruction_tag;
    Rgb target_color = {0, 0, 0};
    Rect goal_region;
};

struct SceneConfig {
    int img = kImageSize;
    int n_obstacles = 1;
    int n_novel = 0;  // 0..3
    int plan_len = 12;
    float goal_row = 32.f, goal_col = 52.f, goal_half = 8.f;
    float grip_start_row = 32.f, grip_start_col = 18.f;
    // Spawn bands (inclusive float ranges).
    float target_row_lo = 26.f, target_row_hi = 38.f;
    float target_col_lo = 12.f, target_col_hi = 22.f;
    std::vector<Rgb> training_palette_override;
    std::vector<Rgb> novel_palette_override;

    const std::vector<Rgb>& training_colors() const;
    const std::vector<Rgb>& novel_colors() const;
    nlohmann::json to_json() const;
    /// Strict parse: unknown keys are rejected.
    static SceneConfig from_json(const nlohmann::json& j);
};

struct SceneState {
    SceneConfig config;
    std::vector<ObjectSpec> objects;
    float grip_row = 0, grip_col = 0;
    int grip_closed = 0;
    std::optional<int> held;
    Rect goal_region;
    uint64_t rng_seed = 0;
    int tick = 0;

    const ObjectSpec* find(int id) const;
    const ObjectSpec* target() const;
};

struct RenderOutput {
    Frame frame;
    std::vector<int32_t> label_map;  // object id per pixel, 0 = background
    std::vector<int32_t> depth_map;  // depth rank of the labeling object, 0 = background
    int h = 0, w = 0;

    int32_t label(int r, int c) const { return label_map[size_t(r) * w + c]; }
    int32_t depth(int r, int c) const { return depth_map[size_t(r) * w + c]; }
};

struct Outcome {
    bool success = false;
    bool collision = false;
};

/// Reproducible scene from (config, seed); throws std::runtime_error when
/// rejection sampling cannot place all objects in 1000 attempts.
SceneState init_scene(const SceneConfig& config, uint64_t seed);

SceneState step(const SceneState& state, const Action& action);

/// Painter's-algorithm render; the gripper is drawn last in its reserved
/// color and never enters label_map/depth_map.
RenderOutput render(const SceneState& state);

/// Rasterized pixel footprint of one object (ignoring occlusion).
Mask object_footprint(const SceneState& state, int object_id);
Mask gripper_footprint(const SceneState& state);

TaskSpec task_of(const SceneState& state);

Outcome check_outcome(const std::vector<SceneState>& trajectory, const TaskSpec& task);

/// Collision-unaware pick-and-place plan: straight to the target, grab,
/// carry via one noisy midpoint waypoint, release. noise is the waypoint
/// Gaussian std in pixels; only the carry midpoint is perturbed.
ActionPlan scripted_policy(const SceneState& state, const TaskSpec& task, float noise, Rng& rng);

/// Plan toward an explicit (target, goal) pair; used by the planners, which
/// read those positions from the observation instead of simulator state.
ActionPlan scripted_plan_from_positions(float start_row, float start_col, float target_row,
                                        float target_col, float goal_row, float goal_col,
                                        float noise, int plan_len, Rng& rng);

/// T i.i.d. uniform actions; the grip command toggles with p=0.1 per tick.
ActionPlan sample_exploration_plan(Rng& rng, int plan_len);

/// Rolls a plan forward from state; returns plan_len+1 states incl. start.
std::vector<SceneState> execute_plan(const SceneState& state, const ActionPlan& plan);

}  // namespace reoi::sim
