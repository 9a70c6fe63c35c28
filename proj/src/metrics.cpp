#include "reoi/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace reoi::metrics {

double proxy_perceptual(const Frame& a, const Frame& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("proxy_perceptual: shape mismatch");
    return (wm::encode(a) - wm::encode(b)).norm() / std::sqrt(double(wm::kLatentDim));
}

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd out;
    out.n = int(xs.size());
    if (xs.empty()) return out;
    for (double x : xs) out.mean += x;
    out.mean /= xs.size();
    for (double x : xs) out.sd += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(out.sd / xs.size());
    return out;
}

namespace {
nlohmann::json ms_json(const MeanStd& m) {
    return {{"mean", m.mean}, {"std", m.sd}, {"n", m.n}};
}
}  // namespace

nlohmann::json PredReport::to_json() const {
    return {{"mode", mode},
            {"ssim_full", ms_json(ssim_full)},
            {"proxy_perceptual_full", ms_json(proxy_full)},
            {"ssim_indist", ms_json(ssim_indist)},
            {"proxy_perceptual_indist", ms_json(proxy_indist)},
            {"n_scenes", n_scenes}};
}

EvalScene make_eval_scene(const sim::SceneConfig& config, uint64_t seed) {
    EvalScene scene;
    scene.state0 = sim::init_scene(config, seed);
    scene.task = sim::task_of(scene.state0);
    Rng rng = derive_rng(seed, 0, "eval-plan");
    scene.plan = sim::scripted_policy(scene.state0, scene.task, 2.0f, rng);
    scene.obs0 = sim::render(scene.state0).frame;
    auto traj = sim::execute_plan(scene.state0, scene.plan);
    for (size_t t = 1; t < traj.size(); ++t)
        scene.gt_frames.push_back(sim::render(traj[t]).frame);
    return scene;
}

PredReport eval_pred(const wm::WorldModel& model, const std::vector<EvalScene>& scenes,
                     const std::string& mode, double tau) {
    if (mode != "baseline" && mode != "reoi")
        throw std::invalid_argument("eval_pred: mode must be baseline or reoi");

    const int n = int(scenes.size());
    std::vector<double> s_full(n), p_full(n), s_in(n), p_in(n);

    // Scenes are independent; slot-indexed outputs keep the aggregation
    // order fixed regardless of scheduling.
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        const EvalScene& sc = scenes[i];
        std::vector<Frame> pred;
        distractor::IdentificationReport rep;
        if (mode == "reoi") {
            mpc::ReoiRollout rr = mpc::reoi_rollout(model, sc.obs0, sc.plan, sc.task, tau);
            pred = std::move(rr.frames);
            rep = std::move(rr.report);
        } else {
            pred = wm::rollout(model, sc.obs0, {}, sc.plan);
            rep = distractor::identify(model, sc.obs0, sc.task, tau);
        }

        double ssim_acc = 0, proxy_acc = 0;
        for (size_t t = 0; t < pred.size(); ++t) {
            ssim_acc += ssim(pred[t], sc.gt_frames[t]);
            proxy_acc += proxy_perceptual(pred[t], sc.gt_frames[t]);
        }
        s_full[i] = ssim_acc / pred.size();
        p_full[i] = proxy_acc / pred.size();

        // In-distribution component: inpaint the identified distractor masks
        // in both the ground truth and the prediction, then re-score.
        Mask union_mask(sc.obs0.h, sc.obs0.w);
        for (int id : rep.flagged) {
            const distractor::Segment* seg = rep.find(id);
            if (seg) union_mask = mask_union(union_mask, seg->mask);
        }
        double ssim_in = 0, proxy_in = 0;
        for (size_t t = 0; t < pred.size(); ++t) {
            Frame gt_inp = distractor::inpaint(sc.gt_frames[t], union_mask);
            Frame pr_inp = distractor::inpaint(pred[t], union_mask);
            ssim_in += ssim(pr_inp, gt_inp);
            proxy_in += proxy_perceptual(pr_inp, gt_inp);
        }
        s_in[i] = ssim_in / pred.size();
        p_in[i] = proxy_in / pred.size();
    }

    PredReport rep;
    rep.mode = mode;
    rep.ssim_full = mean_std(s_full);
    rep.proxy_full = mean_std(p_full);
    rep.ssim_indist = mean_std(s_in);
    rep.proxy_indist = mean_std(p_in);
    rep.n_scenes = n;
    return rep;
}

nlohmann::json BenchReport::to_json() const {
    nlohmann::json j{{"meta", meta}};
    for (const auto& [mode, stats] : modes) {
        nlohmann::json eps = nlohmann::json::array();
        for (const auto& e : stats.episodes)
            eps.push_back({{"seed", e.seed},
                           {"needs_human", e.needs_human},
                           {"completed", e.completed},
                           {"collision", e.collision},
                           {"success", e.success}});
        j["modes"][mode] = {{"success_rate", stats.success_rate},
                            {"collision_rate", stats.collision_rate},
                            {"needs_human_rate", stats.needs_human_rate},
                            {"n_episodes", stats.n_episodes},
                            {"episodes", eps}};
    }
    return j;
}

BenchReport bench_planning(const wm::WorldModel& model, const trustregion::TrustRegion* region,
                           const BenchConfig& config) {
    BenchReport report;
    for (const std::string& mode : config.modes) {
        if (mode == "trustregion" && !region)
            throw std::invalid_argument("bench_planning: trustregion mode needs a region");

        std::vector<EpisodeLog> logs(config.episodes);
#pragma omp parallel for schedule(dynamic)
        for (int e = 0; e < config.episodes; ++e) {
            uint64_t seed = config.seed * 1000003ULL + uint64_t(e);
            sim::SceneState state = sim::init_scene(config.scene, seed);
            sim::TaskSpec task = sim::task_of(state);
            Frame obs = sim::render(state).frame;
            Rng rng = derive_rng(config.seed, uint64_t(e), "bench-" + mode);

            mpc::PlanResult plan;
            if (mode == "baseline")
                plan = mpc::plan_baseline(model, obs, task, config.n_candidates, rng,
                                          config.scene.plan_len);
            else if (mode == "reoi")
                plan = mpc::plan_reoi(model, obs, task, config.n_candidates, rng,
                                      config.scene.plan_len, config.tau);
            else if (mode == "trustregion")
                plan = trustregion::plan_trustregion(model, *region, obs, task,
                                                     config.n_candidates, rng,
                                                     config.scene.plan_len);
            else
                throw std::invalid_argument("bench_planning: unknown mode " + mode);

            EpisodeLog log;
            log.seed = seed;
            if (!plan.chosen) {
                log.needs_human = true;
            } else {
                auto traj = sim::execute_plan(state, plan.plans[*plan.chosen]);
                sim::Outcome out = sim::check_outcome(traj, task);
                log.completed = out.success;
                log.collision = out.collision;
                // "Successfully and safely completes the task".
                log.success = out.success && !out.collision;
            }
            logs[e] = log;
        }

        ModeStats stats;
        stats.n_episodes = config.episodes;
        stats.episodes = logs;
        for (const auto& l : logs) {
            stats.success_rate += l.success;
            stats.collision_rate += l.collision;
            stats.needs_human_rate += l.needs_human;
        }
        stats.success_rate /= config.episodes;
        stats.collision_rate /= config.episodes;
        stats.needs_human_rate /= config.episodes;
        report.modes[mode] = std::move(stats);
    }

    report.meta = {{"episodes", config.episodes},
                   {"seed", config.seed},
                   {"n_candidates", config.n_candidates},
                   {"tau", config.tau},
                   {"scene", config.scene.to_json()}};
    return report;
}

}  // namespace reoi::metrics
