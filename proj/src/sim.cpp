#include "reoi/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <cstdio>
#include <cstdlib>

namespace reoi::sim {

// Training colors, background and gripper all satisfy G == (R+B)/2; novel
// colors carry a green offset of at least 0.45 off that subspace and an
// L-inf distance of at least 0.25 from every training color (checked in
// tests). Segmentation additionally relies on all palette entries being
// distinct after 12-level quantization.
const std::vector<Rgb>& training_palette() {
    static const std::vector<Rgb> p = {
        {0.90f, 0.50f, 0.10f},  // orange
        {0.10f, 0.50f, 0.90f},  // azure (container)
        {0.62f, 0.32f, 0.02f},  // brown
        {0.30f, 0.60f, 0.90f},  // sky
        {0.95f, 0.75f, 0.55f},  // peach
        {0.75f, 0.45f, 0.15f},  // amber
    };
    return p;
}

const std::vector<Rgb>& novel_palette() {
    static const std::vector<Rgb> p = {
        {0.10f, 0.85f, 0.10f},  // green
        {0.85f, 0.10f, 0.85f},  // magenta
        {0.55f, 0.10f, 0.95f},  // violet
        {0.45f, 0.95f, 0.15f},  // lime
        {0.40f, 0.05f, 0.60f},  // purple
        {0.05f, 0.75f, 0.45f},  // emerald
    };
    return p;
}

std::string to_string(Shape s) {
    switch (s) {
        case Shape::circle: return "circle";
        case Shape::rect: return "rect";
        case Shape::triangle: return "triangle";
    }
    return "?";
}
std::string to_string(Category c) { return c == Category::training ? "training" : "novel"; }
std::string to_string(Role r) {
    switch (r) {
        case Role::target: return "target";
        case Role::obstacle: return "obstacle";
        case Role::distractor: return "distractor";
        case Role::container: return "container";
    }
    return "?";
}

const std::vector<Rgb>& SceneConfig::training_colors() const {
    return training_palette_override.empty() ? training_palette() : training_palette_override;
}
const std::vector<Rgb>& SceneConfig::novel_colors() const {
    return novel_palette_override.empty() ? novel_palette() : novel_palette_override;
}

nlohmann::json SceneConfig::to_json() const {
    nlohmann::json j{{"img", img},
                     {"n_obstacles", n_obstacles},
                     {"n_novel", n_novel},
                     {"plan_len", plan_len},
                     {"goal_row", goal_row},
                     {"goal_col", goal_col},
                     {"goal_half", goal_half},
                     {"grip_start_row", grip_start_row},
                     {"grip_start_col", grip_start_col},
                     {"target_row_lo", target_row_lo},
                     {"target_row_hi", target_row_hi},
                     {"target_col_lo", target_col_lo},
                     {"target_col_hi", target_col_hi}};
    auto pal = [](const std::vector<Rgb>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& c : v) a.push_back({c[0], c[1], c[2]});
        return a;
    };
    if (!training_palette_override.empty()) j["training_palette"] = pal(training_palette_override);
    if (!novel_palette_override.empty()) j["novel_palette"] = pal(novel_palette_override);
    return j;
}

SceneConfig SceneConfig::from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known = {
        "img",           "n_obstacles",   "n_novel",        "plan_len",
        "goal_row",      "goal_col",      "goal_half",      "grip_start_row",
        "grip_start_col", "target_row_lo", "target_row_hi", "target_col_lo",
        "target_col_hi", "training_palette", "novel_palette"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw std::runtime_error("unknown scene config key: " + it.key());
    }
    SceneConfig c;
    auto get = [&](const char* k, auto& field) {
        if (j.contains(k)) field = j.at(k).get<std::decay_t<decltype(field)>>();
    };
    get("img", c.img);
    get("n_obstacles", c.n_obstacles);
    get("n_novel", c.n_novel);
    get("plan_len", c.plan_len);
    get("goal_row", c.goal_row);
    get("goal_col", c.goal_col);
    get("goal_half", c.goal_half);
    get("grip_start_row", c.grip_start_row);
    get("grip_start_col", c.grip_start_col);
    get("target_row_lo", c.target_row_lo);
    get("target_row_hi", c.target_row_hi);
    get("target_col_lo", c.target_col_lo);
    get("target_col_hi", c.target_col_hi);
    auto pal = [&](const char* k, std::vector<Rgb>& out) {
        if (!j.contains(k)) return;
        out.clear();
        for (const auto& e : j.at(k)) out.push_back({e.at(0).get<float>(), e.at(1).get<float>(), e.at(2).get<float>()});
    };
    pal("training_palette", c.training_palette_override);
    pal("novel_palette", c.novel_palette_override);
    if (c.n_novel < 0 || c.n_novel > 3) throw std::runtime_error("n_novel must be in 0..3");
    return c;
}

const ObjectSpec* SceneState::find(int id) const {
    for (const auto& o : objects)
        if (o.id == id) return &o;
    return nullptr;
}

const ObjectSpec* SceneState::target() const {
    for (const auto& o : objects)
        if (o.role == Role::target) return &o;
    return nullptr;
}

namespace {

bool inside_shape(const ObjectSpec& o, int r, int c) {
    float dr = r - o.row, dc = c - o.col;
    switch (o.shape) {
        case Shape::circle: return dr * dr + dc * dc <= o.size * o.size;
        case Shape::rect:
            // Half-open: a size-s rect at an integer center covers 2s pixels.
            return dr >= -o.size && dr < o.size && dc >= -o.size && dc < o.size;
        case Shape::triangle: {
            // Apex up; base at row + size spans the full width.
            if (dr < -o.size || dr > o.size) return false;
            float half = (dr + o.size) * 0.5f;
            return std::fabs(dc) <= half;
        }
    }
    return false;
}

struct Extent {
    float r0, c0, r1, c1;
};

Extent extent_of(float row, float col, float size) { return {row - size, col - size, row + size, col + size}; }

bool extents_overlap(const Extent& a, const Extent& b, float margin) {
    return a.r0 - margin < b.r1 && b.r0 - margin < a.r1 && a.c0 - margin < b.c1 &&
           b.c0 - margin < a.c1;
}

bool placement_ok(const SceneState& s, float row, float col, float size, float margin) {
    Extent e = extent_of(row, col, size);
    for (const auto& o : s.objects)
        if (extents_overlap(e, extent_of(o.row, o.col, o.size), margin)) return false;
    return true;
}

Rect raster_bbox(const ObjectSpec& o, int img) {
    int r0 = std::max(0, int(std::ceil(o.row - o.size)));
    int c0 = std::max(0, int(std::ceil(o.col - o.size)));
    int r1 = std::min(img, int(std::floor(o.row + o.size)) + 1);
    int c1 = std::min(img, int(std::floor(o.col + o.size)) + 1);
    return {r0, c0, r1, c1};
}

}  // namespace

SceneState init_scene(const SceneConfig& config, uint64_t seed) {
    Rng rng = derive_rng(seed, 0, "scene");
    const auto& tp = config.training_colors();
    const auto& np = config.novel_colors();

    SceneState s;
    s.config = config;
    s.rng_seed = seed;
    s.grip_row = config.grip_start_row;
    s.grip_col = config.grip_start_col;

    int next_id = 1;
    int next_rank = 1;

    ObjectSpec container;
    container.id = next_id++;
    container.shape = Shape::rect;
    container.color = tp[kContainerColorIndex % tp.size()];
    container.row = config.goal_row;
    container.col = config.goal_col;
    container.size = config.goal_half;
    container.depth_rank = next_rank++;
    container.role = Role::container;
    s.objects.push_back(container);
    s.goal_region = {int(std::ceil(container.row - container.size)),
                     int(std::ceil(container.col - container.size)),
                     int(std::ceil(container.row + container.size)),
                     int(std::ceil(container.col + container.size))};

    // Target color: any training color except the container's.
    int tgt_color;
    do {
        tgt_color = int(rng.uniform_int(tp.size()));
    } while (tgt_color == kContainerColorIndex % int(tp.size()));

    ObjectSpec target;
    target.id = next_id++;
    target.shape = Shape::circle;
    target.color = tp[tgt_color];
    target.size = 5.f;
    target.depth_rank = next_rank++;
    target.role = Role::target;
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
        target.row = std::floor(rng.uniform(config.target_row_lo, config.target_row_hi) + 0.5f);
        target.col = std::floor(rng.uniform(config.target_col_lo, config.target_col_hi) + 0.5f);
        placed = placement_ok(s, target.row, target.col, target.size, 2.f);
    }
    if (!placed) throw std::runtime_error("init_scene: could not place target");
    s.objects.push_back(target);

    // Obstacles are patch-aligned squares (8 or 16 px) in the top/bottom
    // strips, so their renders are exactly representable by the patch
    // encoder; the unseen-shape distractors are not.
    for (int i = 0; i < config.n_obstacles; ++i) {
        ObjectSpec obs;
        obs.id = next_id++;
        obs.shape = Shape::rect;
        int ci;
        do {
            ci = int(rng.uniform_int(tp.size()));
        } while (ci == tgt_color || ci == kContainerColorIndex % int(tp.size()));
        obs.color = tp[ci];
        obs.depth_rank = next_rank++;
        obs.role = Role::obstacle;
        placed = false;
        for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
            obs.size = rng.bernoulli(0.5) ? 4.f : 8.f;
            int rows = obs.size > 4 ? 1 : 2;  // aligned start rows per strip
            int r_opt = int(rng.uniform_int(2 * rows));
            float row0 = obs.size > 4 ? (r_opt == 0 ? 8.f : 40.f)
                                      : 8.f * float(r_opt < 2 ? 1 + r_opt : 3 + r_opt);
            int max_c0 = (config.img - int(2 * obs.size)) / 8;
            float col0 = 8.f * float(1 + rng.uniform_int(uint64_t(max_c0 - 1)));
            obs.row = row0 + obs.size;
            obs.col = col0 + obs.size;
            placed = placement_ok(s, obs.row, obs.col, obs.size, 2.f);
        }
        if (!placed) throw std::runtime_error("init_scene: could not place obstacle");
        s.objects.push_back(obs);
    }

    // Novel distractors sit in the carry corridor between the target and the
    // goal, offset a few pixels from the straight carry line.
    for (int i = 0; i < config.n_novel; ++i) {
        ObjectSpec dis;
        dis.id = next_id++;
        dis.shape = Shape::triangle;
        dis.color = np[rng.uniform_int(np.size())];
        dis.size = float(int(rng.uniform(5.f, 6.999f)));
        dis.depth_rank = next_rank++;
        dis.category = Category::novel;
        dis.role = Role::distractor;
        placed = false;
        for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
            if (i == 0) {
                // First distractor shadows the carry corridor, a few pixels
                // off the straight carry line; widen the band if crowded.
                float dc = std::floor(rng.uniform(30.f, 40.f) + 0.5f);
                float t = (dc - target.col) / (config.goal_col - target.col);
                float line_row = target.row + (config.goal_row - target.row) * t;
                float hi = attempt < 500 ? 9.f : 18.f;
                float off = rng.uniform(3.f, hi) * (rng.bernoulli(0.5) ? 1.f : -1.f);
                dis.row = std::floor(std::clamp(line_row + off, 12.f, 52.f) + 0.5f);
                dis.col = dc;
            } else {
                dis.row = std::floor(rng.uniform(10.f, 54.f) + 0.5f);
                dis.col = std::floor(rng.uniform(10.f, 54.f) + 0.5f);
            }
            placed = placement_ok(s, dis.row, dis.col, dis.size, 2.f);
            if (getenv("REOI_DBG") && attempt < 12)
                std::fprintf(stderr, "dis %d attempt %d: (%.0f,%.0f) size %.0f -> %d\n", i,
                             attempt, dis.row, dis.col, dis.size, int(placed));
        }
        if (!placed) throw std::runtime_error("init_scene: could not place distractor");
        s.objects.push_back(dis);
    }

    return s;
}

SceneState step(const SceneState& state, const Action& action) {
    SceneState s = state;
    s.tick = state.tick + 1;

    float dx = std::clamp(action.dx, -1.f, 1.f);
    float dy = std::clamp(action.dy, -1.f, 1.f);
    float half = kGripperHalf;
    s.grip_row = std::clamp(s.grip_row + dx * kVMax, half, float(s.config.img - 1) - half);
    s.grip_col = std::clamp(s.grip_col + dy * kVMax, half, float(s.config.img - 1) - half);

    if (s.held) {
        for (auto& o : s.objects)
            if (o.id == *s.held) {
                o.row = s.grip_row;
                o.col = s.grip_col;
            }
    }

    int cmd = action.grip ? 1 : 0;
    if (!state.grip_closed && cmd) {
        // Attach the nearest object center within the pickup radius.
        int best = -1;
        float best_d = kPickupRadius;
        for (const auto& o : s.objects) {
            float d = std::hypot(o.row - s.grip_row, o.col - s.grip_col);
            if (d <= best_d + 1e-6f && (best < 0 || d < best_d)) {
                best = o.id;
                best_d = d;
            }
        }
        if (best >= 0) {
            s.held = best;
            for (auto& o : s.objects)
                if (o.id == best) {
                    o.row = s.grip_row;
                    o.col = s.grip_col;
                }
        }
    } else if (state.grip_closed && !cmd) {
        s.held.reset();
    }
    s.grip_closed = cmd;
    return s;
}

RenderOutput render(const SceneState& state) {
    const int n = state.config.img;
    RenderOutput out;
    out.h = out.w = n;
    out.frame = Frame(n, n);
    out.label_map.assign(size_t(n) * n, 0);
    out.depth_map.assign(size_t(n) * n, 0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) out.frame.set(r, c, kBackground);

    std::vector<const ObjectSpec*> order;
    for (const auto& o : state.objects) order.push_back(&o);
    std::sort(order.begin(), order.end(),
              [](const ObjectSpec* a, const ObjectSpec* b) { return a->depth_rank < b->depth_rank; });

    for (const ObjectSpec* o : order) {
        Rect bb = raster_bbox(*o, n).dilated(1).clamped(n, n);
        for (int r = bb.r0; r < bb.r1; ++r)
            for (int c = bb.c0; c < bb.c1; ++c)
                if (inside_shape(*o, r, c)) {
                    out.frame.set(r, c, o->color);
                    out.label_map[size_t(r) * n + c] = o->id;
                    out.depth_map[size_t(r) * n + c] = o->depth_rank;
                }
    }

    // Gripper drawn last, never labeled.
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (std::fabs(r - state.grip_row) <= kGripperHalf &&
                std::fabs(c - state.grip_col) <= kGripperHalf)
                out.frame.set(r, c, kGripperColor);

    return out;
}

Mask object_footprint(const SceneState& state, int object_id) {
    const int n = state.config.img;
    Mask m(n, n);
    const ObjectSpec* o = state.find(object_id);
    if (!o) return m;
    Rect bb = raster_bbox(*o, n).dilated(1).clamped(n, n);
    for (int r = bb.r0; r < bb.r1; ++r)
        for (int c = bb.c0; c < bb.c1; ++c)
            if (inside_shape(*o, r, c)) m.at(r, c) = 1;
    return m;
}

Mask gripper_footprint(const SceneState& state) {
    const int n = state.config.img;
    Mask m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (std::fabs(r - state.grip_row) <= kGripperHalf &&
                std::fabs(c - state.grip_col) <= kGripperHalf)
                m.at(r, c) = 1;
    return m;
}

TaskSpec task_of(const SceneState& state) {
    TaskSpec t;
    const ObjectSpec* target = state.target();
    if (!target) throw std::runtime_error("task_of: scene has no target");
    t.target_color = target->color;
    t.goal_region = state.goal_region;
    t.instruction_tag = "pick-target-into-goal";
    return t;
}

Outcome check_outcome(const std::vector<SceneState>& trajectory, const TaskSpec& task) {
    Outcome out;
    if (trajectory.empty()) return out;

    const SceneState& final_state = trajectory.back();
    const ObjectSpec* target = final_state.target();
    int target_id = target ? target->id : -1;
    int container_id = -1;
    for (const auto& o : final_state.objects)
        if (o.role == Role::container) container_id = o.id;

    if (target && (!final_state.held || *final_state.held != target_id))
        out.success = task.goal_region.contains(int(std::lround(target->row)),
                                                int(std::lround(target->col)));

    for (const auto& s : trajectory) {
        RenderOutput r = render(s);
        Mask foot = gripper_footprint(s);
        if (s.held) foot = mask_union(foot, object_footprint(s, *s.held));
        int held_id = s.held ? *s.held : -1;
        for (int rr = 0; rr < r.h && !out.collision; ++rr)
            for (int cc = 0; cc < r.w; ++cc) {
                if (!foot.at(rr, cc)) continue;
                int lbl = r.label(rr, cc);
                if (lbl != 0 && lbl != target_id && lbl != container_id && lbl != held_id) {
                    out.collision = true;
                    break;
                }
            }
        if (out.collision) break;
    }
    return out;
}

namespace {

/// Per-tick actions moving from (row, col) to the waypoint; both axes move
/// simultaneously, each clamped to v_max.
void emit_moves(float& row, float& col, float wr, float wc, int grip, ActionPlan& plan,
                int plan_len) {
    while (int(plan.size()) < plan_len) {
        float dr = wr - row, dc = wc - col;
        if (std::fabs(dr) < 1e-3f && std::fabs(dc) < 1e-3f) return;
        float sr = std::clamp(dr, -kVMax, kVMax);
        float sc = std::clamp(dc, -kVMax, kVMax);
        plan.push_back({sr / kVMax, sc / kVMax, grip});
        row += sr;
        col += sc;
    }
}

}  // namespace

ActionPlan scripted_plan_from_positions(float start_row, float start_col, float target_row,
                                        float target_col, float goal_row, float goal_col,
                                        float noise, int plan_len, Rng& rng) {
    ActionPlan plan;
    float row = start_row, col = start_col;

    emit_moves(row, col, target_row, target_col, 0, plan, plan_len);
    if (int(plan.size()) < plan_len) plan.push_back({0, 0, 1});  // grab

    // The carry leg detours through a noisy midpoint. Like the multi-modal
    // imitation policies this stands in for, the midpoint mixes a discrete
    // lane choice (left of / on / right of the direct line) with Gaussian
    // jitter; both scale with `noise`, so noise=0 is the direct route.
    float lane = float(int(rng.uniform_int(3)) - 1) * 2.5f * noise;
    float leg_r = goal_row - target_row, leg_c = goal_col - target_col;
    float leg_len = std::hypot(leg_r, leg_c);
    float perp_r = leg_len > 1e-6f ? -leg_c / leg_len : 0.f;
    float perp_c = leg_len > 1e-6f ? leg_r / leg_len : 0.f;
    float mid_row = 0.5f * (target_row + goal_row) + lane * perp_r + float(noise * rng.gauss());
    float mid_col = 0.5f * (target_col + goal_col) + lane * perp_c + float(noise * rng.gauss());
    emit_moves(row, col, mid_row, mid_col, 1, plan, plan_len);
    emit_moves(row, col, goal_row, goal_col, 1, plan, plan_len);
    if (int(plan.size()) < plan_len) plan.push_back({0, 0, 0});  // release

    while (int(plan.size()) < plan_len) plan.push_back({0, 0, 0});
    plan.resize(plan_len);
    return plan;
}

ActionPlan scripted_policy(const SceneState& state, const TaskSpec& task, float noise, Rng& rng) {
    const ObjectSpec* target = state.target();
    if (!target) throw std::runtime_error("scripted_policy: no target");
    float goal_row = 0.5f * (task.goal_region.r0 + task.goal_region.r1 - 1);
    float goal_col = 0.5f * (task.goal_region.c0 + task.goal_region.c1 - 1);
    return scripted_plan_from_positions(state.grip_row, state.grip_col, target->row, target->col,
                                        goal_row, goal_col, noise, state.config.plan_len, rng);
}

ActionPlan sample_exploration_plan(Rng& rng, int plan_len) {
    ActionPlan plan;
    int grip = 0;
    for (int t = 0; t < plan_len; ++t) {
        float dx = float(rng.uniform(-1.0, 1.0));
        float dy = float(rng.uniform(-1.0, 1.0));
        if (rng.bernoulli(0.1)) grip = 1 - grip;
        plan.push_back({dx, dy, grip});
    }
    return plan;
}

std::vector<SceneState> execute_plan(const SceneState& state, const ActionPlan& plan) {
    std::vector<SceneState> traj;
    traj.reserve(plan.size() + 1);
    traj.push_back(state);
    for (const Action& a : plan) traj.push_back(step(traj.back(), a));
    return traj;
}

}  // namespace reoi::sim
