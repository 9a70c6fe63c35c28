#include "reoi/mpc.hpp"

#include <algorithm>
#include <cmath>

namespace reoi::mpc {

double reward(const std::vector<Frame>& frames, const sim::TaskSpec& task) {
    if (frames.empty()) throw std::invalid_argument("reward: no frames");
    const Frame& f = frames.back();
    int total = 0, inside = 0;
    for (int r = 0; r < f.h; ++r)
        for (int c = 0; c < f.w; ++c) {
            if (rgb_dist(f.rgb(r, c), task.target_color) >= 0.15f) continue;
            ++total;
            if (task.goal_region.contains(r, c)) ++inside;
        }
    return total == 0 ? 0.0 : double(inside) / double(total);
}

namespace {

// Moving content the verifier tracks in a predicted frame: the gripper and
// the target it may be carrying. Decoded carry frames show the gripper as a
// dark, weakly saturated mixture of gripper, target and background, so the
// thresholds here are looser than the sharp-render gripper extraction.
Mask verify_robot_mask(const Frame& f, const sim::TaskSpec& task) {
    Mask m(f.h, f.w);
    for (int r = 0; r < f.h; ++r)
        for (int c = 0; c < f.w; ++c) {
            Rgb p = f.rgb(r, c);
            float lum = (p[0] + p[1] + p[2]) / 3.f;
            float sat = std::max({std::fabs(p[0] - lum), std::fabs(p[1] - lum),
                                  std::fabs(p[2] - lum)});
            if ((lum < 0.58f && sat < 0.25f) || rgb_dist(p, task.target_color) < 0.15f)
                m.at(r, c) = 1;
        }
    return m;
}

}  // namespace

Verdict verify(const std::vector<Frame>& frames, const sim::TaskSpec& task,
               const std::vector<Mask>& distractor_masks) {
    for (size_t k = 0; k < frames.size(); ++k) {
        Mask robot = verify_robot_mask(frames[k], task).dilated(1);
        for (const Mask& dm : distractor_masks)
            if (robot.intersects(dm)) return Verdict::reject(int(k), "collision");
    }
    return Verdict::accept(reward(frames, task));
}

std::optional<int> select(const std::vector<Verdict>& verdicts) {
    std::optional<int> best;
    for (size_t i = 0; i < verdicts.size(); ++i) {
        if (!verdicts[i].accepted()) continue;
        if (!best || verdicts[i].reward > verdicts[*best].reward) best = int(i);
    }
    return best;
}

namespace {

struct Point {
    float row = 0, col = 0;
    bool found = false;
};

Point color_centroid(const Frame& f, const Rgb& color, float tol) {
    double sr = 0, sc = 0;
    int n = 0;
    for (int r = 0; r < f.h; ++r)
        for (int c = 0; c < f.w; ++c)
            if (rgb_dist(f.rgb(r, c), color) < tol) {
                sr += r;
                sc += c;
                ++n;
            }
    if (n == 0) return {};
    return {float(sr / n), float(sc / n), true};
}

Point mask_centroid(const Mask& m) {
    double sr = 0, sc = 0;
    int n = 0;
    for (int r = 0; r < m.h; ++r)
        for (int c = 0; c < m.w; ++c)
            if (m.at(r, c)) {
                sr += r;
                sc += c;
                ++n;
            }
    if (n == 0) return {};
    return {float(sr / n), float(sc / n), true};
}

}  // namespace

std::vector<sim::ActionPlan> sample_candidates(const Frame& obs, const sim::TaskSpec& task,
                                               int n_candidates, int plan_len, Rng& rng) {
    Point grip = mask_centroid(distractor::gripper_color_mask(obs));
    Point target = color_centroid(obs, task.target_color, 0.15f);
    float goal_row = 0.5f * (task.goal_region.r0 + task.goal_region.r1 - 1);
    float goal_col = 0.5f * (task.goal_region.c0 + task.goal_region.c1 - 1);
    if (!grip.found) grip = {float(obs.h) / 2, float(obs.w) / 2, true};
    if (!target.found) target = {goal_row, goal_col, true};

    std::vector<sim::ActionPlan> plans;
    plans.reserve(n_candidates);
    for (int i = 0; i < n_candidates; ++i)
        plans.push_back(sim::scripted_plan_from_positions(grip.row, grip.col, target.row,
                                                          target.col, goal_row, goal_col,
                                                          kCandidateNoise, plan_len, rng));
    return plans;
}

PlanResult plan_baseline(const wm::WorldModel& model, const Frame& obs, const sim::TaskSpec& task,
                         int n_candidates, Rng& rng, int plan_len) {
    PlanResult result;
    result.mode = "baseline";
    result.plans = sample_candidates(obs, task, n_candidates, plan_len, rng);

    distractor::IdentificationReport rep = distractor::identify(model, obs, task);

    for (const sim::ActionPlan& plan : result.plans) {
        std::vector<Frame> frames = wm::rollout(model, obs, {}, plan);

        // The baseline verifier only knows a flagged distractor to the extent
        // it survives in the raw predicted frames: re-segment the check frame
        // and keep masks whose quantized color and location still match.
        std::vector<Mask> masks;
        int check = std::min<int>(rep.check_frame_index, int(frames.size())) - 1;
        auto survived = distractor::segment(frames[check]);
        for (int id : rep.flagged) {
            const distractor::Segment* orig = rep.find(id);
            if (!orig) continue;
            for (const auto& s : survived)
                if (distractor::quantize(s.mean_color) == distractor::quantize(orig->mean_color) &&
                    s.bbox.intersects(orig->bbox)) {
                    masks.push_back(s.mask);
                    break;
                }
        }
        result.verdicts.push_back(verify(frames, task, masks));
        result.rollouts.push_back(std::move(frames));
    }
    result.chosen = select(result.verdicts);
    return result;
}

ReoiRollout reoi_rollout(const wm::WorldModel& model, const Frame& obs,
                         const sim::ActionPlan& plan, const sim::TaskSpec& task, double tau) {
    ReoiRollout out;
    out.report = distractor::identify(model, obs, task, tau);

    Mask union_mask(obs.h, obs.w);
    for (int id : out.report.flagged) {
        const distractor::Segment* seg = out.report.find(id);
        if (!seg) continue;
        union_mask = mask_union(union_mask, seg->mask);
        out.flagged_masks.push_back(seg->mask);
    }
    out.layers = composite::extract_layers(obs, out.report);

    Frame modified = distractor::inpaint(obs, union_mask);
    std::vector<Frame> frames = wm::rollout(model, modified, {}, plan);
    out.frames = composite::reinsert(frames, out.layers);
    return out;
}

PlanResult plan_reoi(const wm::WorldModel& model, const Frame& obs, const sim::TaskSpec& task,
                     int n_candidates, Rng& rng, int plan_len, double tau) {
    PlanResult result;
    result.mode = "reoi";
    result.plans = sample_candidates(obs, task, n_candidates, plan_len, rng);

    distractor::IdentificationReport rep = distractor::identify(model, obs, task, tau);
    Mask union_mask(obs.h, obs.w);
    std::vector<Mask> flagged_masks;
    for (int id : rep.flagged) {
        const distractor::Segment* seg = rep.find(id);
        if (!seg) continue;
        union_mask = mask_union(union_mask, seg->mask);
        flagged_masks.push_back(seg->mask);
    }
    std::vector<composite::Layer> layers = composite::extract_layers(obs, rep);
    Frame modified = distractor::inpaint(obs, union_mask);

    for (const sim::ActionPlan& plan : result.plans) {
        std::vector<Frame> frames = wm::rollout(model, modified, {}, plan);
        frames = composite::reinsert(frames, layers);
        result.verdicts.push_back(verify(frames, task, flagged_masks));
        result.rollouts.push_back(std::move(frames));
    }
    result.chosen = select(result.verdicts);
    return result;
}

}  // namespace reoi::mpc
