#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "reoi/mpc.hpp"
#include "reoi/sim.hpp"
#include "reoi/ssim.hpp"
#include "reoi/trustregion.hpp"
#include "reoi/wm.hpp"

namespace reoi::metrics {

/// Perceptual-similarity proxy: L2 between patch features, normalized by
/// sqrt(D). Not LPIPS; lower = more similar.
double proxy_perceptual(const Frame& a, const Frame& b);

struct MeanStd {
    double mean = 0, sd = 0;
    int n = 0;
};
MeanStd mean_std(const std::vector<double>& xs);

struct PredReport {
    std::string mode;
    MeanStd ssim_full, proxy_full, ssim_indist, proxy_indist;
    int n_scenes = 0;
    nlohmann::json to_json() const;
};

/// A prepared evaluation scenario: a distractor scene, the plan chosen for
/// it, and the ground-truth frames from executing that plan in the simulator.
struct EvalScene {
    sim::SceneState state0;
    sim::TaskSpec task;
    sim::ActionPlan plan;
    std::vector<Frame> gt_frames;  // length plan_len, excludes frame0
    Frame obs0;
};
EvalScene make_eval_scene(const sim::SceneConfig& config, uint64_t seed);

/// Table-1 style protocol: full-observation SSIM/proxy of the predicted
/// rollout vs ground truth, then the same after inpainting the identified
/// distractor masks from both. mode: "baseline" (raw rollout) or "reoi".
PredReport eval_pred(const wm::WorldModel& model, const std::vector<EvalScene>& scenes,
                     const std::string& mode, double tau = distractor::kDefaultTau);

struct EpisodeLog {
    uint64_t seed = 0;
    bool needs_human = false;
    bool completed = false;  // target released in goal
    bool collision = false;
    bool success = false;    // completed && !collision
};

struct ModeStats {
    double success_rate = 0, collision_rate = 0, needs_human_rate = 0;
    int n_episodes = 0;
    std::vector<EpisodeLog> episodes;
};

struct BenchConfig {
    int episodes = 20;
    uint64_t seed = 0;
    int n_candidates = mpc::kDefaultCandidates;
    double tau = distractor::kDefaultTau;
    std::vector<std::string> modes = {"baseline", "reoi", "trustregion"};
    sim::SceneConfig scene;  // scene.n_novel distractors per episode

    BenchConfig() {
        scene.n_novel = 1;
        scene.plan_len = 14;
    }
};

struct BenchReport {
    std::map<std::string, ModeStats> modes;
    nlohmann::json meta;
    nlohmann::json to_json() const;
};

/// Table-2 style benchmark: per episode seed, build a distractor scene, run
/// each mode's planner, execute the chosen plan in the simulator. A trial
/// succeeds when the task completes without collision; NeedsHuman counts as
/// non-success, non-collision. `region` may be null unless "trustregion" is
/// in the mode list.
BenchReport bench_planning(const wm::WorldModel& model, const trustregion::TrustRegion* region,
                           const BenchConfig& config);

}  // namespace reoi::metrics
