// Command-line harness wiring the simulator, world model, ReOI pipeline and
// benchmarks into reproducible experiments. Every subcommand writes a JSON
// report (or images) carrying its effective config, seeds and hashes.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "reoi/distractor.hpp"
#include "reoi/io.hpp"
#include "reoi/metrics.hpp"
#include "reoi/mpc.hpp"
#include "reoi/sim.hpp"
#include "reoi/threading.hpp"
#include "reoi/trustregion.hpp"
#include "reoi/wm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace reoi;

namespace {

constexpr const char* kArtifactVersion = "1.0";

void write_json(const std::string& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(2) << "\n";
}

json meta_block(const std::string& command, const json& config) {
    return {{"artifact_version", kArtifactVersion},
            {"command", command},
            {"config", config},
            {"threads", max_threads()}};
}

sim::SceneConfig scene_config(const std::string& config_path, int novel, int plan_len) {
    sim::SceneConfig cfg;
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw std::runtime_error("cannot read scene config " + config_path);
        cfg = sim::SceneConfig::from_json(json::parse(f));
    }
    if (novel >= 0) cfg.n_novel = novel;
    if (plan_len > 0) cfg.plan_len = plan_len;
    return cfg;
}

std::vector<std::string> split_modes(const std::string& s) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        if (comma > pos) out.push_back(s.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

std::vector<std::string> episode_files(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".rwmd")
            files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<wm::Trajectory> load_dataset(const std::string& dir) {
    std::vector<wm::Trajectory> out;
    for (const auto& f : episode_files(dir)) out.push_back(io::load_episode(f));
    if (out.empty()) throw std::runtime_error("no .rwmd episodes under " + dir);
    return out;
}

bool has_novel_objects(const wm::Trajectory& t) {
    if (!t.metadata.contains("objects")) return false;
    for (const auto& o : t.metadata["objects"])
        if (o.value("category", "") == "novel") return true;
    return false;
}

json objects_json(const sim::SceneState& s) {
    json arr = json::array();
    for (const auto& o : s.objects)
        arr.push_back({{"id", o.id},
                       {"shape", sim::to_string(o.shape)},
                       {"category", sim::to_string(o.category)},
                       {"role", sim::to_string(o.role)},
                       {"color", {o.color[0], o.color[1], o.color[2]}},
                       {"row", o.row},
                       {"col", o.col},
                       {"size", o.size},
                       {"depth_rank", o.depth_rank}});
    return arr;
}

json verdict_json(const mpc::Verdict& v) {
    switch (v.kind) {
        case mpc::Verdict::Kind::accept:
            return {{"kind", "accept"}, {"reward", v.reward}};
        case mpc::Verdict::Kind::reject_unsafe:
            return {{"kind", "reject_unsafe"}, {"frame_index", v.frame_index}, {"reason", v.reason}};
        default:
            return {{"kind", "needs_human"}};
    }
}

// Region inputs: one (z0, plan) point and one latent error per episode.
std::pair<Eigen::MatrixXd, std::vector<double>> region_points(const wm::WorldModel& model,
                                                              const std::vector<wm::Trajectory>& data) {
    std::vector<double> errors;
    Eigen::MatrixXd points;
    for (size_t i = 0; i < data.size(); ++i) {
        Eigen::VectorXd x = trustregion::plan_input(wm::encode(data[i].frames[0]), data[i].actions);
        if (i == 0) points.resize(data.size(), x.size());
        points.row(i) = x;
        errors.push_back(wm::latent_error(model, data[i]));
    }
    return {points, errors};
}

int cmd_gen_data(const std::string& out, int episodes, uint64_t seed, int novel,
                 const std::string& policy, const std::string& config_path, int plan_len) {
    sim::SceneConfig cfg = scene_config(config_path, novel, plan_len);
    fs::create_directories(fs::path(out) / "episodes");

    int n_scripted = 0;
    if (policy == "scripted") n_scripted = episodes;
    else if (policy == "mixed") n_scripted = (episodes * 2) / 5;  // 40% policy, 60% exploration
    else if (policy != "random") throw std::runtime_error("unknown policy " + policy);

    for (int e = 0; e < episodes; ++e) {
        uint64_t ep_seed = seed * 1000003ULL + uint64_t(e);
        sim::SceneState state = sim::init_scene(cfg, ep_seed);
        sim::TaskSpec task = sim::task_of(state);
        Rng rng = derive_rng(seed, uint64_t(e), "gen-data");
        bool scripted = e < n_scripted;
        sim::ActionPlan plan = scripted ? sim::scripted_policy(state, task, 3.0f, rng)
                                        : sim::sample_exploration_plan(rng, cfg.plan_len);

        wm::Trajectory traj;
        for (const auto& s : sim::execute_plan(state, plan))
            traj.frames.push_back(sim::render(s).frame);
        traj.actions = plan;
        traj.metadata = {{"seed", ep_seed},
                         {"policy", scripted ? "scripted" : "random"},
                         {"scene", cfg.to_json()},
                         {"objects", objects_json(state)}};

        char name[32];
        std::snprintf(name, sizeof(name), "ep%05d.rwmd", e);
        io::save_episode((fs::path(out) / "episodes" / name).string(), traj);
    }

    std::string hash = io::hash_dataset((fs::path(out) / "episodes").string());
    json manifest = meta_block("gen-data", {{"episodes", episodes},
                                            {"seed", seed},
                                            {"policy", policy},
                                            {"scene", cfg.to_json()}});
    manifest["dataset_hash"] = hash;
    write_json((fs::path(out) / "manifest.json").string(), manifest);
    std::cout << "dataset " << out << " hash " << hash << "\n";
    return 0;
}

int cmd_train(const std::string& data, const std::string& out, double ridge) {
    auto dataset = load_dataset(data);
    for (const auto& t : dataset)
        if (has_novel_objects(t))
            throw std::runtime_error(
                "train: dataset contains novel-category objects; refusing to train");

    std::string hash = io::hash_dataset((fs::path(data) / "episodes").string());
    wm::WorldModel model = wm::train(dataset, ridge);
    model.manifest["dataset_hash"] = hash;
    model.manifest["data_dir"] = data;
    io::save_model(out, model);

    json report = meta_block("train", {{"data", data}, {"ridge", ridge}});
    report["dataset_hash"] = hash;
    report["model_hash"] = io::hash_file(out);
    report["residuals"] = {{"dyn_mean", model.residuals.dyn_mean},
                           {"dyn_max", model.residuals.dyn_max},
                           {"dec_mean", model.residuals.dec_mean},
                           {"dec_max", model.residuals.dec_max}};
    write_json(out + ".report.json", report);
    std::cout << "model " << out << " dyn residual mean " << model.residuals.dyn_mean << " max "
              << model.residuals.dyn_max << "\n";
    return 0;
}

int cmd_region(const std::string& data, const std::string& model_path, const std::string& out,
               double r0, double r_max) {
    wm::WorldModel model = io::load_model(model_path);
    auto dataset = load_dataset(data);
    auto [points, errors] = region_points(model, dataset);
    trustregion::TrustRegion region = trustregion::build(points, errors, -1.0, r0);
    region = trustregion::expand(region, points, errors, 1.0, 0.05, r_max);
    region.provenance["model_hash"] = io::hash_file(model_path);
    io::save_region(out, region);

    json report = meta_block("region", {{"data", data}, {"model", model_path}, {"r0", r0},
                                        {"r_max", r_max}});
    report["region"] = {{"n_centers", region.centers.rows()},
                        {"radius", region.radius},
                        {"lipschitz", region.lipschitz},
                        {"max_train_error", region.max_train_error},
                        {"bound", region.bound()}};
    write_json(out + ".report.json", report);
    std::cout << "region " << out << " r " << region.radius << " L " << region.lipschitz
              << " bound " << region.bound() << "\n";
    return 0;
}

int cmd_eval_pred(const std::string& model_path, int scenes, uint64_t seed, int novel,
                  const std::string& modes_csv, double tau, const std::string& out,
                  const std::string& config_path) {
    wm::WorldModel model = io::load_model(model_path);
    sim::SceneConfig cfg = scene_config(config_path, novel, 0);

    std::vector<metrics::EvalScene> eval_scenes;
    std::vector<uint64_t> seeds;
    for (int i = 0; i < scenes; ++i) {
        uint64_t s = seed * 1000003ULL + uint64_t(i);
        seeds.push_back(s);
        eval_scenes.push_back(metrics::make_eval_scene(cfg, s));
    }

    json report = meta_block("eval-pred", {{"model", model_path},
                                           {"scenes", scenes},
                                           {"seed", seed},
                                           {"tau", tau},
                                           {"scene", cfg.to_json()}});
    report["meta"]["model_hash"] = io::hash_file(model_path);
    report["meta"]["scene_seeds"] = seeds;
    for (const std::string& mode : split_modes(modes_csv)) {
        metrics::PredReport pr = metrics::eval_pred(model, eval_scenes, mode, tau);
        report["results"][mode] = pr.to_json();
        std::cout << mode << ": ssim_full " << pr.ssim_full.mean << " ssim_indist "
                  << pr.ssim_indist.mean << "\n";
    }
    write_json(out, report);
    return 0;
}

int cmd_plan(const std::string& model_path, uint64_t scene_seed, int novel,
             const std::string& mode, const std::string& region_path, int n, double tau,
             const std::string& out, const std::string& films, const std::string& config_path,
             int plan_len) {
    wm::WorldModel model = io::load_model(model_path);
    sim::SceneConfig cfg = scene_config(config_path, novel, plan_len);
    sim::SceneState state = sim::init_scene(cfg, scene_seed);
    sim::TaskSpec task = sim::task_of(state);
    Frame obs = sim::render(state).frame;
    Rng rng = derive_rng(scene_seed, 0, "plan-" + mode);

    mpc::PlanResult result;
    if (mode == "baseline")
        result = mpc::plan_baseline(model, obs, task, n, rng, cfg.plan_len);
    else if (mode == "reoi")
        result = mpc::plan_reoi(model, obs, task, n, rng, cfg.plan_len, tau);
    else if (mode == "trustregion") {
        trustregion::TrustRegion region = io::load_region(region_path);
        result = trustregion::plan_trustregion(model, region, obs, task, n, rng, cfg.plan_len);
    } else
        throw std::runtime_error("unknown mode " + mode);

    json verdicts = json::array();
    for (const auto& v : result.verdicts) verdicts.push_back(verdict_json(v));
    json report = meta_block("plan", {{"model", model_path},
                                      {"scene_seed", scene_seed},
                                      {"mode", mode},
                                      {"n_candidates", n},
                                      {"tau", tau},
                                      {"scene", cfg.to_json()}});
    report["meta"]["model_hash"] = io::hash_file(model_path);
    report["chosen"] = result.chosen ? json(*result.chosen) : json(nullptr);
    report["verdicts"] = verdicts;
    write_json(out, report);

    if (!films.empty()) {
        fs::create_directories(films);
        for (size_t c = 0; c < result.rollouts.size(); ++c)
            for (size_t t = 0; t < result.rollouts[c].size(); ++t) {
                char name[48];
                std::snprintf(name, sizeof(name), "cand%02zu_f%02zu.ppm", c, t);
                io::write_ppm((fs::path(films) / name).string(), result.rollouts[c][t]);
            }
    }
    std::cout << "plan " << mode << " chosen "
              << (result.chosen ? std::to_string(*result.chosen) : std::string("needs_human"))
              << "\n";
    return 0;
}

int cmd_bench(const std::string& model_path, const std::string& modes_csv, int episodes,
              uint64_t seed, const std::string& region_path, int novel, int n, double tau,
              const std::string& out, const std::string& config_path, int plan_len) {
    wm::WorldModel model = io::load_model(model_path);
    metrics::BenchConfig cfg;
    cfg.episodes = episodes;
    cfg.seed = seed;
    cfg.n_candidates = n;
    cfg.tau = tau;
    cfg.modes = split_modes(modes_csv);
    cfg.scene = scene_config(config_path, novel, plan_len);

    trustregion::TrustRegion region;
    bool need_region =
        std::find(cfg.modes.begin(), cfg.modes.end(), "trustregion") != cfg.modes.end();
    if (need_region) region = io::load_region(region_path);

    metrics::BenchReport report = metrics::bench_planning(model, need_region ? &region : nullptr, cfg);
    json j = report.to_json();
    j["meta"]["command"] = "bench";
    j["meta"]["artifact_version"] = kArtifactVersion;
    j["meta"]["model_hash"] = io::hash_file(model_path);
    write_json(out, j);
    for (const auto& [mode, stats] : report.modes)
        std::cout << mode << ": success " << stats.success_rate << " collision "
                  << stats.collision_rate << " needs_human " << stats.needs_human_rate << "\n";
    return 0;
}

int cmd_identify(const std::string& model_path, uint64_t scene_seed, int novel, double tau,
                 const std::string& out, const std::string& masks_dir,
                 const std::string& config_path) {
    wm::WorldModel model = io::load_model(model_path);
    sim::SceneConfig cfg = scene_config(config_path, novel, 0);
    sim::SceneState state = sim::init_scene(cfg, scene_seed);
    sim::TaskSpec task = sim::task_of(state);
    Frame obs = sim::render(state).frame;

    distractor::IdentificationReport rep = distractor::identify(model, obs, task, tau);
    json segs = json::array();
    for (size_t i = 0; i < rep.segments.size(); ++i) {
        const auto& s = rep.segments[i];
        segs.push_back({{"id", s.id},
                        {"bbox", {s.bbox.r0, s.bbox.c0, s.bbox.r1, s.bbox.c1}},
                        {"area", s.area},
                        {"mean_color", {s.mean_color[0], s.mean_color[1], s.mean_color[2]}},
                        {"score", rep.scores[i]},
                        {"flagged", std::find(rep.flagged.begin(), rep.flagged.end(), s.id) !=
                                        rep.flagged.end()}});
    }
    json report = meta_block("identify", {{"model", model_path},
                                          {"scene_seed", scene_seed},
                                          {"tau", tau},
                                          {"scene", cfg.to_json()}});
    report["meta"]["model_hash"] = io::hash_file(model_path);
    report["check_frame_index"] = rep.check_frame_index;
    report["segments"] = segs;
    report["flagged"] = rep.flagged;
    write_json(out, report);

    if (!masks_dir.empty()) {
        fs::create_directories(masks_dir);
        for (const auto& s : rep.segments) {
            char name[32];
            std::snprintf(name, sizeof(name), "segment%03d.pbm", s.id);
            io::write_pbm((fs::path(masks_dir) / name).string(), s.mask);
        }
    }
    std::cout << "identify: " << rep.segments.size() << " segments, " << rep.flagged.size()
              << " flagged\n";
    return 0;
}

int cmd_render(uint64_t scene_seed, int novel, const std::string& out_prefix,
               const std::string& config_path) {
    sim::SceneConfig cfg = scene_config(config_path, novel, 0);
    sim::SceneState state = sim::init_scene(cfg, scene_seed);
    sim::RenderOutput r = sim::render(state);
    io::write_ppm(out_prefix + ".ppm", r.frame);

    json report = meta_block("render", {{"scene_seed", scene_seed}, {"scene", cfg.to_json()}});
    report["objects"] = objects_json(state);
    write_json(out_prefix + ".json", report);
    std::cout << "rendered " << out_prefix << ".ppm\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ReOI: distractor-robust world-model planning testbed"};
    app.require_subcommand(1);

    std::string out, data, model_path, policy = "mixed", modes = "baseline,reoi", mode = "reoi";
    std::string region_path, films, masks_dir, config_path, out_prefix = "scene";
    int episodes = 10, novel = -1, scenes = 30, n = mpc::kDefaultCandidates, plan_len = 0;
    uint64_t seed = 0, scene_seed = 0;
    double ridge = 1e-3, tau = distractor::kDefaultTau, r0 = 0.1, r_max = 0.5;

    auto* gen = app.add_subcommand("gen-data", "generate an episode dataset");
    gen->add_option("--out", out)->required();
    gen->add_option("--episodes", episodes)->required();
    gen->add_option("--seed", seed)->required();
    gen->add_option("--novel", novel)->check(CLI::Range(0, 3));
    gen->add_option("--policy", policy)->check(CLI::IsMember({"scripted", "random", "mixed"}));
    gen->add_option("--config", config_path);
    gen->add_option("--plan-len", plan_len);

    auto* train = app.add_subcommand("train", "train the world model");
    train->add_option("--data", data)->required();
    train->add_option("--out", out)->required();
    train->add_option("--ridge", ridge);

    auto* region = app.add_subcommand("region", "build the trust region from a dataset");
    region->add_option("--data", data)->required();
    region->add_option("--model", model_path)->required();
    region->add_option("--out", out)->required();
    region->add_option("--r0", r0);
    region->add_option("--r-max", r_max);

    auto* eval = app.add_subcommand("eval-pred", "prediction-quality evaluation");
    eval->add_option("--model", model_path)->required();
    eval->add_option("--scenes", scenes);
    eval->add_option("--seed", seed);
    eval->add_option("--novel", novel)->check(CLI::Range(0, 3));
    eval->add_option("--modes", modes);
    eval->add_option("--tau", tau);
    eval->add_option("--out", out)->required();
    eval->add_option("--config", config_path);

    auto* plan = app.add_subcommand("plan", "plan one episode");
    plan->add_option("--model", model_path)->required();
    plan->add_option("--scene-seed", scene_seed)->required();
    plan->add_option("--novel", novel)->check(CLI::Range(0, 3));
    plan->add_option("--mode", mode)->check(CLI::IsMember({"baseline", "reoi", "trustregion"}));
    plan->add_option("--region", region_path);
    plan->add_option("--n", n);
    plan->add_option("--tau", tau);
    plan->add_option("--out", out)->required();
    plan->add_option("--films", films);
    plan->add_option("--config", config_path);
    plan->add_option("--plan-len", plan_len);

    auto* bench = app.add_subcommand("bench", "success/collision benchmark");
    bench->add_option("--model", model_path)->required();
    bench->add_option("--modes", modes);
    bench->add_option("--episodes", episodes);
    bench->add_option("--seed", seed);
    bench->add_option("--region", region_path);
    bench->add_option("--novel", novel)->check(CLI::Range(0, 3));
    bench->add_option("--n", n);
    bench->add_option("--tau", tau);
    bench->add_option("--out", out)->required();
    bench->add_option("--config", config_path);
    bench->add_option("--plan-len", plan_len);

    auto* ident = app.add_subcommand("identify", "distractor identification report");
    ident->add_option("--model", model_path)->required();
    ident->add_option("--scene-seed", scene_seed)->required();
    ident->add_option("--novel", novel)->check(CLI::Range(0, 3));
    ident->add_option("--tau", tau);
    ident->add_option("--out", out)->required();
    ident->add_option("--masks", masks_dir);
    ident->add_option("--config", config_path);

    auto* render = app.add_subcommand("render", "render a scene to a pixmap");
    render->add_option("--scene-seed", scene_seed)->required();
    render->add_option("--novel", novel)->check(CLI::Range(0, 3));
    render->add_option("--out", out_prefix);
    render->add_option("--config", config_path);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen_data(out, episodes, seed, novel, policy, config_path, plan_len);
        if (train->parsed()) return cmd_train(data, out, ridge);
        if (region->parsed()) return cmd_region(data, model_path, out, r0, r_max);
        if (eval->parsed())
            return cmd_eval_pred(model_path, scenes, seed, novel, modes, tau, out, config_path);
        if (plan->parsed())
            return cmd_plan(model_path, scene_seed, novel, mode, region_path, n, tau, out, films,
                            config_path, plan_len);
        if (bench->parsed())
            return cmd_bench(model_path, modes, episodes, seed, region_path, novel, n, tau, out,
                             config_path, plan_len);
        if (ident->parsed())
            return cmd_identify(model_path, scene_seed, novel, tau, out, masks_dir, config_path);
        if (render->parsed()) return cmd_render(scene_seed, novel, out_prefix, config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
