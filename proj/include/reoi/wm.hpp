#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "json.hpp"
#include "reoi/sim.hpp"
#include "reoi/types.hpp"

namespace reoi::wm {

// Fixed encoder geometry: 8x8 grid of 8-px patches, mean RGB per patch.
inline constexpr int kPatch = 8;
inline constexpr int kGrid = 8;
inline constexpr int kLatentDim = kGrid * kGrid * 3;  // 192
inline constexpr int kActionDim = 3;
inline constexpr int kHistory = 3;
inline constexpr int kDynInputDim = kHistory * kLatentDim + kActionDim;  // 579
inline constexpr int kFrameDim = sim::kImageSize * sim::kImageSize * 3;  // 12288

using Latent = Eigen::VectorXd;

struct Trajectory {
    std::vector<Frame> frames;     // T+1
    sim::ActionPlan actions;       // T
    nlohmann::json metadata;
};

struct ResidualStats {
    double dyn_mean = 0, dyn_max = 0;
    double dec_mean = 0, dec_max = 0;
};

/// Ridge-trained linear latent world model. Immutable after train().
struct WorldModel {
    Eigen::MatrixXd dyn_W;  // kLatentDim x kDynInputDim
    Eigen::MatrixXd dec_W;  // kFrameDim x kLatentDim
    double ridge_lambda = 0;
    ResidualStats residuals;
    nlohmann::json manifest;

    bool trained() const { return dyn_W.size() > 0 && dec_W.size() > 0; }
};

/// Per-patch mean RGB, row-major over (patch row, patch col, channel).
Latent encode(const Frame& frame);

Frame decode(const WorldModel& model, const Latent& z);

Latent predict_next(const WorldModel& model, const std::array<Latent, kHistory>& history,
                    const sim::Action& action);

/// Autoregressive rollout: returns the T predicted (decoded) observations.
/// `warmup` holds up to kHistory-1 frames preceding frame0; missing history
/// is padded by repeating the earliest available frame.
std::vector<Frame> rollout(const WorldModel& model, const Frame& frame0,
                           const std::vector<Frame>& warmup, const sim::ActionPlan& plan);

/// Closed-form ridge training of dynamics and decoder over all transition
/// tuples / (latent, frame) pairs. Throws on an empty dataset or when the
/// normal matrix is not positive definite (lambda = 0 on degenerate data).
WorldModel train(const std::vector<Trajectory>& dataset, double lambda = 1e-3);

/// Sum over the horizon of the L2 gap between the autoregressively
/// predicted latents and the encoded ground-truth frames.
double latent_error(const WorldModel& model, const Trajectory& trajectory);
std::vector<double> latent_error_per_step(const WorldModel& model, const Trajectory& trajectory);

}  // namespace reoi::wm
