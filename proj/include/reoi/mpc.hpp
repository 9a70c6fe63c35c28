#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reoi/composite.hpp"
#include "reoi/distractor.hpp"
#include "reoi/rng.hpp"
#include "reoi/sim.hpp"
#include "reoi/types.hpp"
#include "reoi/wm.hpp"

namespace reoi::mpc {

inline constexpr int kDefaultCandidates = 8;
inline constexpr float kCandidateNoise = 4.0f;  // waypoint std, px

struct Verdict {
    enum class Kind { accept, reject_unsafe, needs_human };
    Kind kind = Kind::needs_human;
    double reward = 0;
    int frame_index = -1;
    std::string reason;

    static Verdict accept(double r) { return {Kind::accept, r, -1, ""}; }
    static Verdict reject(int frame, std::string why) {
        return {Kind::reject_unsafe, 0, frame, std::move(why)};
    }
    bool accepted() const { return kind == Kind::accept; }
};

struct PlanResult {
    std::optional<int> chosen;
    std::vector<Verdict> verdicts;
    std::vector<std::vector<Frame>> rollouts;
    std::vector<sim::ActionPlan> plans;
    std::string mode;
};

/// Fraction of target-colored pixels of the final frame that lie inside the
/// goal region; 0 when no target-colored pixel is visible.
double reward(const std::vector<Frame>& frames, const sim::TaskSpec& task);

/// Rejects the rollout if the (1-px dilated) gripper-color mask of any frame
/// intersects any distractor mask; otherwise accepts with the reward.
Verdict verify(const std::vector<Frame>& frames, const sim::TaskSpec& task,
               const std::vector<Mask>& distractor_masks);

/// Argmax reward over accepted verdicts, ties to the lowest index;
/// nullopt (escalate to a human) when every candidate is rejected.
std::optional<int> select(const std::vector<Verdict>& verdicts);

/// The identify -> inpaint -> reimagine -> reinsert pipeline for one plan.
struct ReoiRollout {
    std::vector<Frame> frames;              // reimagined + reinserted
    distractor::IdentificationReport report;
    std::vector<composite::Layer> layers;   // frozen distractor layers
    std::vector<Mask> flagged_masks;        // t=0 masks used for verification
};
ReoiRollout reoi_rollout(const wm::WorldModel& model, const Frame& obs,
                         const sim::ActionPlan& plan, const sim::TaskSpec& task,
                         double tau = distractor::kDefaultTau);

PlanResult plan_baseline(const wm::WorldModel& model, const Frame& obs, const sim::TaskSpec& task,
                         int n_candidates, Rng& rng, int plan_len = 12);
PlanResult plan_reoi(const wm::WorldModel& model, const Frame& obs, const sim::TaskSpec& task,
                     int n_candidates, Rng& rng, int plan_len = 12,
                     double tau = distractor::kDefaultTau);

/// Candidate plans read the gripper/target positions from the observation.
std::vector<sim::ActionPlan> sample_candidates(const Frame& obs, const sim::TaskSpec& task,
                                               int n_candidates, int plan_len, Rng& rng);

}  // namespace reoi::mpc
